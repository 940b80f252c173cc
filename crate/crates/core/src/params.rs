use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratio::Ratio;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("video length T must be positive, got {0}")]
    Duration(Ratio),
    #[error("playback rate b must be positive, got {0}")]
    PlaybackRate(Ratio),
    #[error("segment count N must be at least 1, got {0}")]
    Segments(u32),
    #[error("sub-slot count m must be at least 1, got {0}")]
    Subslots(u32),
}

impl ParamsError {
    /// Name of the offending field.
    pub fn field(&self) -> &'static str {
        match self {
            ParamsError::Duration(_) => "duration",
            ParamsError::PlaybackRate(_) => "playback_rate",
            ParamsError::Segments(_) => "num_segments",
            ParamsError::Subslots(_) => "subslots",
        }
    }
}

/// Video and slotting parameters.
///
/// Schedules work in canonical units where one slot lasts 1 and the playback
/// rate is 1, so the video holds `N` data units. `duration` and
/// `playback_rate` are only used to convert canonical values for display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoParams {
    duration: Ratio,
    playback_rate: Ratio,
    num_segments: u32,
    subslots: u32,
}

impl VideoParams {
    pub fn new(
        duration: Ratio,
        playback_rate: Ratio,
        num_segments: u32,
        subslots: u32,
    ) -> Result<VideoParams, ParamsError> {
        if !duration.is_positive() {
            return Err(ParamsError::Duration(duration));
        }
        if !playback_rate.is_positive() {
            return Err(ParamsError::PlaybackRate(playback_rate));
        }
        if num_segments < 1 {
            return Err(ParamsError::Segments(num_segments));
        }
        if subslots < 1 {
            return Err(ParamsError::Subslots(subslots));
        }
        Ok(VideoParams {
            duration,
            playback_rate,
            num_segments,
            subslots,
        })
    }

    /// Canonical parameters: `T = N` slots, `b = 1`.
    pub fn canonical(num_segments: u32, subslots: u32) -> Result<VideoParams, ParamsError> {
        VideoParams::new(
            Ratio::from(num_segments.max(1)),
            Ratio::ONE,
            num_segments,
            subslots,
        )
    }

    pub fn duration(&self) -> Ratio {
        self.duration
    }

    pub fn playback_rate(&self) -> Ratio {
        self.playback_rate
    }

    pub fn num_segments(&self) -> u32 {
        self.num_segments
    }

    pub fn subslots(&self) -> u32 {
        self.subslots
    }

    /// Slot length `T/N` in display time units.
    pub fn slot_length(&self) -> Ratio {
        self.duration / Ratio::from(self.num_segments)
    }

    /// Video size `T·b` in display data units.
    pub fn video_size(&self) -> Ratio {
        self.duration * self.playback_rate
    }

    /// Video size in canonical data units.
    pub fn canonical_size(&self) -> Ratio {
        Ratio::from(self.num_segments)
    }

    pub fn subslot_length(&self) -> Ratio {
        Ratio::unit(self.subslots as i128)
    }

    pub fn with_subslots(&self, subslots: u32) -> Result<VideoParams, ParamsError> {
        VideoParams::new(
            self.duration,
            self.playback_rate,
            self.num_segments,
            subslots,
        )
    }

    pub fn display_time(&self, canonical: Ratio) -> Ratio {
        canonical * self.slot_length()
    }

    pub fn display_rate(&self, canonical: Ratio) -> Ratio {
        canonical * self.playback_rate
    }

    pub fn display_data(&self, canonical: Ratio) -> Ratio {
        canonical * self.slot_length() * self.playback_rate
    }

    /// Converts a display-unit time to canonical slots.
    pub fn canonical_time(&self, display: Ratio) -> Ratio {
        display / self.slot_length()
    }
}

/// Validating constructor taking the parameters in their usual order.
pub fn make_params(
    duration: Ratio,
    playback_rate: Ratio,
    num_segments: u32,
    subslots: u32,
) -> Result<VideoParams, ParamsError> {
    VideoParams::new(duration, playback_rate, num_segments, subslots)
}
