//! The single-big-player family on which Banzhaf power outgrows weight:
//! `A = {2k}`, `m = k^1.5`, `T = k + k^1.5 / 2` for `k = (2n)^2`.

use num_integer::Roots;

use crate::game::{AnyGame, Game};
use crate::indices::{self, IndexKind};
use crate::ratios::{RatioError, RatioRecord};

/// The family member for `k`, which must be the square of an even number.
pub fn family_game(k: u64) -> Result<Game, RatioError> {
    let root = k.sqrt();
    if k == 0 || root * root != k || !root.is_multiple_of(2) {
        return Err(RatioError::InvalidFamilyK(k));
    }
    let m = k * root;
    Game::new(vec![2 * k], m, k + m / 2).map_err(|_| RatioError::InvalidFamilyK(k))
}

/// Absolute and normalized Banzhaf ratio records for every `k`, in order.
pub fn banzhaf_family(ks: &[u64]) -> Result<Vec<RatioRecord>, RatioError> {
    let games: Vec<Game> = ks.iter().map(|&k| family_game(k)).collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(2 * games.len());
    for g in games {
        let any = AnyGame::Base(g);
        for kind in [IndexKind::BanzhafAbs, IndexKind::BanzhafNorm] {
            let power = indices::aggregate_big(&any, kind)?;
            out.push(RatioRecord::new(any.clone(), kind, power)?);
        }
    }
    Ok(out)
}
