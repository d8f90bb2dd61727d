use rand::Rng;

use super::{trial_rng, SimplexPoint, StepObserver, Survivors, WalkConfig, WalkOutcome};
use crate::error::{Error, Result};

/// Integer chip holdings for `start` with `chips` in total.
pub fn chip_counts(start: &SimplexPoint, chips: u64) -> Result<Vec<u64>> {
    let k = chips as f64;
    let counts = start
        .coords()
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            let scaled = value * k;
            let rounded = scaled.round();
            if (scaled - rounded).abs() > 1e-9 {
                return Err(Error::NotChipRepresentable {
                    index,
                    value,
                    chips,
                });
            }
            Ok(rounded as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    let total: u64 = counts.iter().sum();
    if total != chips {
        return Err(Error::InvalidStart(format!(
            "chip holdings add up to {total}, expected {chips}"
        )));
    }
    Ok(counts)
}

/// Winner-takes-all chips game.
///
/// Each turn picks an unordered pair of solvent players uniformly and moves
/// one chip between them on a fair coin. Every holding is a martingale, so
/// player `i` wins with probability equal to its starting share.
pub fn run_discrete_game(
    start: &SimplexPoint,
    config: &WalkConfig,
    trial_index: u64,
) -> Result<WalkOutcome> {
    run_discrete_game_observed(start, config, trial_index, &mut super::NoTrace)
}

pub fn run_discrete_game_observed<O: StepObserver>(
    start: &SimplexPoint,
    config: &WalkConfig,
    trial_index: u64,
    observer: &mut O,
) -> Result<WalkOutcome> {
    config.check_start(start)?;
    let n = config.dimension;
    let mut chips = chip_counts(start, config.chips)?;
    let mask: Vec<bool> = chips.iter().map(|&c| c > 0).collect();
    let mut players = Survivors::from_mask(&mask);

    let k = config.chips as f64;
    let mut snapshot: Vec<f64> = chips.iter().map(|&c| c as f64 / k).collect();
    observer.observe(0, &snapshot);

    let mut rng = trial_rng(config.seed, trial_index);
    let mut steps = 0_u64;
    while players.active.len() > 1 {
        if steps == config.max_steps {
            return Err(players.step_limit(n, steps, 1.0));
        }
        steps += 1;

        // An ordered (giver, taker) pair drawn uniformly is the same as an
        // unordered pair plus a fair coin for the direction.
        let m = players.active.len();
        let r = rng.random_range(0..m * (m - 1));
        let giver_pos = r / (m - 1);
        let mut taker_pos = r % (m - 1);
        if taker_pos >= giver_pos {
            taker_pos += 1;
        }
        let giver = players.active[giver_pos];
        let taker = players.active[taker_pos];
        chips[giver] -= 1;
        chips[taker] += 1;
        if chips[giver] == 0 {
            players.active.remove(giver_pos);
            players.eliminated.push(giver);
        }

        if observer.enabled() {
            snapshot[giver] = chips[giver] as f64 / k;
            snapshot[taker] = chips[taker] as f64 / k;
            observer.observe(steps, &snapshot);
        }
    }
    Ok(players.outcome(n, steps, 1.0))
}
