//! Exact oracles for the chips game, built by solving absorbing Markov
//! chains with dense linear algebra.

#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

/// Absorption probabilities at `K` of the fair ±1 walk on `0..=K`, by
/// solving `(I − Q) h = r` over the transient states `1..K`.
pub fn gamblers_ruin_absorption(k_total: usize) -> Vec<f64> {
    let inner = k_total - 1;
    let mut a = DMatrix::<f64>::identity(inner, inner);
    let mut r = DVector::<f64>::zeros(inner);
    for row in 0..inner {
        let k = row + 1;
        if k > 1 {
            a[(row, row - 1)] -= 0.5;
        }
        if k + 1 < k_total {
            a[(row, row + 1)] -= 0.5;
        } else {
            r[row] += 0.5;
        }
    }
    let h = a.lu().solve(&r).expect("gambler's ruin system is regular");
    let mut out = vec![0.0];
    out.extend(h.iter());
    out.push(1.0);
    out
}

/// Every holding of `chips` split among `players`.
fn compositions(chips: usize, players: usize) -> Vec<Vec<usize>> {
    if players == 1 {
        return vec![vec![chips]];
    }
    let mut out = Vec::new();
    for first in 0..=chips {
        for mut rest in compositions(chips - first, players - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Exact win probabilities and expected turns of the chips game.
pub struct ChipsOracle {
    pub states: usize,
    pub win: Vec<f64>,
    pub expected_turns: f64,
}

/// Solves the chips game from `start` (integer holdings) over the full
/// lattice. Each turn picks an ordered (giver, taker) pair of solvent
/// players uniformly; a player with no chips stays out.
pub fn chips_game_oracle(start: &[usize]) -> ChipsOracle {
    let n = start.len();
    let k_total: usize = start.iter().sum();
    let lattice = compositions(k_total, n);
    let transient: Vec<&Vec<usize>> = lattice
        .iter()
        .filter(|s| s.iter().filter(|&&c| c > 0).count() > 1)
        .collect();
    let index: HashMap<&Vec<usize>, usize> =
        transient.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let m = transient.len();

    let mut a = DMatrix::<f64>::identity(m, m);
    // columns 0..n: absorption at each vertex; column n: expected turns
    let mut rhs = DMatrix::<f64>::zeros(m, n + 1);
    for (row, state) in transient.iter().enumerate() {
        rhs[(row, n)] = 1.0;
        let active: Vec<usize> = (0..n).filter(|&i| state[i] > 0).collect();
        let p = 1.0 / (active.len() * (active.len() - 1)) as f64;
        for &giver in &active {
            for &taker in &active {
                if giver == taker {
                    continue;
                }
                let mut next = (*state).clone();
                next[giver] -= 1;
                next[taker] += 1;
                match index.get(&next) {
                    Some(&col) => a[(row, col)] -= p,
                    None => rhs[(row, taker)] += p,
                }
            }
        }
    }
    let solution = a.lu().solve(&rhs).expect("chips game system is regular");
    let row = index[&start.to_vec()];
    ChipsOracle {
        states: lattice.len(),
        win: (0..n).map(|i| solution[(row, i)]).collect(),
        expected_turns: solution[(row, n)],
    }
}
