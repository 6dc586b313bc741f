use serde::Serialize;

/// Search budgets and the seed for every randomized step.
///
/// Reports embed this value so any verdict can be reproduced from the report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    /// Largest number of projective points `(p^n - 1)/(p - 1)` an exhaustive
    /// sweep over a coordinate space may visit.
    pub budget: u64,
    /// Seed for all sampling.
    pub seed: u64,
    /// Number of random members tried before falling back to exhaustive search.
    pub samples: usize,
    /// Cap on the size of an enumerated ideal lattice.
    pub max_ideals: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 1 << 20,
            seed: 0x5eed,
            samples: 64,
            max_ideals: 20_000,
        }
    }
}

impl SearchConfig {
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub(crate) fn rng(&self, salt: u64) -> rand_chacha::ChaCha8Rng {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    pub(crate) fn fits(&self, p: u64, n: usize) -> bool {
        crate::linalg::projective_count(p, n) <= self.budget as u128
    }
}
