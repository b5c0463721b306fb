//! Seeded random corpora.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::word::{inv, is_cyclically_reduced, Letter, Word};

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform freely reduced word of length `n` over `gens` generators.
pub fn random_reduced(rng: &mut (impl Rng + ?Sized), gens: usize, n: usize) -> Word {
    let k = 2 * gens as u32;
    let mut w: Vec<Letter> = Vec::with_capacity(n);
    for _ in 0..n {
        let l = match w.last() {
            None => rng.gen_range(0..k),
            Some(&prev) => {
                // pick among the k-1 letters that do not cancel `prev`
                let mut l = rng.gen_range(0..k - 1);
                if l >= inv(prev) {
                    l += 1;
                }
                l
            }
        };
        w.push(l);
    }
    Word(w)
}

/// Random word restricted to the generator indices in `gens`.
pub fn random_reduced_over(rng: &mut (impl Rng + ?Sized), gens: &[usize], n: usize) -> Word {
    let mut w: Vec<Letter> = Vec::with_capacity(n);
    while w.len() < n {
        let g = gens[rng.gen_range(0..gens.len())];
        let l = crate::word::letter(g, rng.gen_bool(0.5));
        if w.last() == Some(&inv(l)) {
            continue;
        }
        w.push(l);
    }
    Word(w)
}

/// Uniform cyclically reduced word of length `n` (rejection sampling).
pub fn random_cyclically_reduced(rng: &mut (impl Rng + ?Sized), gens: usize, n: usize) -> Word {
    loop {
        let w = random_reduced(rng, gens, n);
        if is_cyclically_reduced(&w) {
            return w;
        }
    }
}
