//! `--params N=4,K=4,m=16,W=2,p=4[,masks=enumerate]`.

use blindlab_core::config::{MaskMode, Params};

use crate::error::CliError;

/// Parses a parameter list. `N` and `K` default to 4; the remaining keys
/// default as in [`Params::new`].
pub fn parse_params(s: &str) -> Result<Params, CliError> {
    let mut n = 4;
    let mut k = 4;
    let mut m = None;
    let mut w = None;
    let mut p = None;
    let mut masks = MaskMode::Replicate;
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Params(format!("expected key=value, got {item:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let number = || {
            value
                .parse::<usize>()
                .map_err(|_| CliError::Params(format!("{key} must be a non-negative integer, got {value:?}")))
        };
        match key {
            "N" => n = number()?,
            "K" => k = number()?,
            "m" => m = Some(number()?),
            "W" => w = Some(number()?),
            "p" => p = Some(number()?),
            "masks" => {
                masks = match value {
                    "replicate" => MaskMode::Replicate,
                    "enumerate" => MaskMode::Enumerate,
                    _ => return Err(CliError::Params(format!("unknown mask mode {value:?}"))),
                }
            }
            _ => return Err(CliError::Params(format!("unknown key {key:?}"))),
        }
    }
    let mut params = Params::new(n, k).with_masks(masks);
    if let Some(m) = m {
        params = params.with_m(m);
    }
    if let Some(w) = w {
        params = params.with_window(w);
    }
    if let Some(p) = p {
        params = params.with_layers(p);
    }
    params.validate()?;
    Ok(params)
}
