use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Arrangement, ArrangementError, Hyperplane};
use crate::Verdict;

/// A generated arrangement together with what is needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generated {
    pub arrangement: Arrangement,
    pub seed: u64,
    pub tries: usize,
}

fn random_vector(rng: &mut ChaCha8Rng, len: usize, bound: i64) -> Vec<BigInt> {
    loop {
        let v: Vec<i64> = (0..len).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|&x| x != 0) {
            return v.into_iter().map(BigInt::from).collect();
        }
    }
}

/// One draw of q nonzero integer forms in [-bound, bound]^{n+1}; `None` if two coincide projectively.
pub fn random_family(rng: &mut ChaCha8Rng, n: usize, q: usize, bound: i64) -> Option<Arrangement> {
    let hs: Vec<Hyperplane> =
        (0..q).map(|_| Hyperplane::from_bigints(random_vector(rng, n + 1, bound)).expect("nonzero")).collect();
    Arrangement::new(n, hs).ok()
}

/// Rejection-samples integer families until one passes the generic condition.
pub fn random_generic(n: usize, q: usize, bound: i64, seed: u64, max_tries: usize) -> Result<Generated, ArrangementError> {
    if q < n + 2 {
        return Err(ArrangementError::TooFewHyperplanes { q, needed: n + 2 });
    }
    if n == 0 || bound < 1 {
        return Err(ArrangementError::Precondition("need n >= 1 and coeff_bound >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for tries in 1..=max_tries {
        let Some(a) = random_family(&mut rng, n, q, bound) else { continue };
        if a.is_general_position()? != Verdict::Holds {
            continue;
        }
        if a.is_generic()? == Verdict::Holds {
            return Ok(Generated { arrangement: a, seed, tries });
        }
    }
    Err(ArrangementError::ExhaustedTries { tries: max_tries })
}
