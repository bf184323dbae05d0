use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the mask blocks of an output row are spread over its registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskMode {
    /// Every register of the row runs the real blocks, so mask pairs are
    /// visible to whoever executes them.
    #[default]
    Replicate,
    /// Each mask window runs the full `{HI, HT}` enumeration, like the gate
    /// windows.
    Enumerate,
}

/// Public shape parameters shared by every circuit compiled under one
/// parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    /// Servers per side (`N`); the system has `2N` servers.
    #[serde(rename = "N")]
    pub servers: usize,
    /// Colluder budget (`K`).
    #[serde(rename = "K")]
    pub colluders: usize,
    /// Gates per V segment before padding (`m`).
    pub m: usize,
    /// V window width in pairs (`W`).
    #[serde(rename = "W")]
    pub window: usize,
    /// Brick layers (`p`), rounded up to even.
    pub p: usize,
    #[serde(default)]
    pub masks: MaskMode,
}

impl Params {
    /// Defaults for a given `(N, K)`: `W = max(1, ⌊K/2⌋)`, `m = 16`, `p = 4`.
    pub fn new(servers: usize, colluders: usize) -> Self {
        Params {
            servers,
            colluders,
            m: 16,
            window: (colluders / 2).max(1),
            p: 4,
            masks: MaskMode::Replicate,
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_window(mut self, w: usize) -> Self {
        self.window = w;
        self
    }

    pub fn with_layers(mut self, p: usize) -> Self {
        self.p = p;
        self
    }

    pub fn with_masks(mut self, masks: MaskMode) -> Self {
        self.masks = masks;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let half_k = self.colluders / 2;
        if self.servers < 4 {
            return Err(Error::InvalidParams(format!(
                "N = {} < 4: the X mask needs four rotation blocks",
                self.servers
            )));
        }
        if self.servers <= half_k {
            return Err(Error::InvalidParams(format!(
                "N = {} must exceed floor(K/2) = {half_k}",
                self.servers
            )));
        }
        if self.window < half_k.max(1) {
            return Err(Error::InvalidParams(format!(
                "W = {} must be at least max(1, floor(K/2)) = {}",
                self.window,
                half_k.max(1)
            )));
        }
        if self.m < 2 || !self.m.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("m = {} must be even and >= 2", self.m)));
        }
        if self.p == 0 {
            return Err(Error::InvalidParams("p must be at least 1".into()));
        }
        Ok(())
    }

    /// Brick layers after rounding up to even.
    pub fn layers(&self) -> usize {
        self.p + self.p % 2
    }

    /// V segment width in pairs: `m/2` rounded up to a multiple of
    /// `lcm(W, 2)` so the `HI` padding always comes in identity pairs.
    pub fn v_width(&self) -> usize {
        let step = if self.window.is_multiple_of(2) {
            self.window
        } else {
            2 * self.window
        };
        (self.m / 2).div_ceil(step) * step
    }

    /// Tracks per V window (`3^W`).
    pub fn v_tracks(&self) -> usize {
        3usize.pow(self.window as u32)
    }
}

/// Everything a server is allowed to know about a compiled circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PublicShape {
    /// Rows (`n`), even.
    pub n: usize,
    /// Brick layers, even.
    pub p: usize,
    pub m: usize,
    pub v_width: usize,
    #[serde(rename = "W")]
    pub window: usize,
    #[serde(rename = "N")]
    pub servers: usize,
    #[serde(rename = "K")]
    pub colluders: usize,
    #[serde(default)]
    pub masks: MaskMode,
}

impl PublicShape {
    pub fn new(logical_qubits: usize, params: &Params) -> Self {
        PublicShape {
            n: logical_qubits + logical_qubits % 2,
            p: params.layers(),
            m: params.m,
            v_width: params.v_width(),
            window: params.window,
            servers: params.servers,
            colluders: params.colluders,
            masks: params.masks,
        }
    }

    /// Registers per mask window after obfuscation.
    pub fn mask_tracks(&self) -> usize {
        match self.masks {
            MaskMode::Replicate => 3usize.pow(self.window as u32),
            MaskMode::Enumerate => 4,
        }
    }
}
