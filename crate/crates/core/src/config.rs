//! Run parameters and the shared arithmetic context.

use crate::error::{Error, Result};
use crate::fq::{Fq, FqEl};
use crate::witt::{WittEl, WittRing};
use std::sync::Arc;

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Legendre symbol (a|p) for odd prime p, as +1, -1, or 0.
pub fn legendre(a: i64, p: u64) -> i32 {
    let pm = p as i64;
    let r = ((a % pm) + pm) % pm;
    if r == 0 {
        return 0;
    }
    let s = mod_pow(r as u64, (p - 1) / 2, p);
    if s == 1 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeConfig {
    /// Odd prime.
    pub p: u64,
    /// Unit that is not a square mod p.
    pub delta: u64,
    /// The ambient residue field is F_{p^{2m}}.
    pub m: usize,
    /// Working precision N: arithmetic mod p^N.
    pub precision: u32,
    /// Denominator budget B; the guard band keeps N - B digits trustworthy.
    pub budget: u32,
}

impl PrimeConfig {
    pub fn new(p: u64) -> Result<PrimeConfig> {
        let delta = smallest_nonsquare(p)?;
        let cfg = PrimeConfig {
            p,
            delta,
            m: 1,
            precision: 12,
            budget: 4,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_delta(mut self, delta: u64) -> Result<PrimeConfig> {
        self.delta = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_m(mut self, m: usize) -> Result<PrimeConfig> {
        self.m = m;
        self.validate()?;
        Ok(self)
    }

    pub fn with_precision(mut self, n: u32) -> Result<PrimeConfig> {
        self.precision = n;
        self.validate()?;
        Ok(self)
    }

    pub fn with_budget(mut self, b: u32) -> Result<PrimeConfig> {
        self.budget = b;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 3 || self.p % 2 == 0 {
            return Err(Error::ConfigInvalid(format!("p must be an odd prime, got {}", self.p)));
        }
        // primality is re-checked by the residue field constructor; do a
        // quick trial division here for a clear early error
        let mut d = 3u64;
        while d * d <= self.p {
            if self.p % d == 0 {
                return Err(Error::ConfigInvalid(format!("p = {} is composite", self.p)));
            }
            d += 2;
        }
        if self.delta % self.p == 0 {
            return Err(Error::ConfigInvalid("delta must be a unit".into()));
        }
        if legendre(self.delta as i64, self.p) != -1 {
            return Err(Error::ConfigInvalid(format!(
                "delta = {} is a square mod {}",
                self.delta, self.p
            )));
        }
        if self.m == 0 || 2 * self.m > 12 {
            return Err(Error::ConfigInvalid(format!("m = {} out of range", self.m)));
        }
        if self.budget == 0 {
            return Err(Error::ConfigInvalid("budget must be positive".into()));
        }
        if self.precision < 2 * self.budget + 4 {
            return Err(Error::ConfigInvalid(format!(
                "precision {} is below 2*budget + 4 = {}",
                self.precision,
                2 * self.budget + 4
            )));
        }
        let bound = (self.p as f64).ln() * self.precision as f64;
        if bound > 62.0f64 * std::f64::consts::LN_2 {
            return Err(Error::ConfigInvalid(format!(
                "p^N does not fit in 62 bits (p = {}, N = {})",
                self.p, self.precision
            )));
        }
        Ok(())
    }
}

pub fn smallest_nonsquare(p: u64) -> Result<u64> {
    if p < 3 || p % 2 == 0 {
        return Err(Error::ConfigInvalid(format!("p must be an odd prime, got {p}")));
    }
    for a in 2..p {
        if legendre(a as i64, p) == -1 {
            return Ok(a);
        }
    }
    Err(Error::ConfigInvalid(format!("no nonsquare unit mod {p}")))
}

/// Shared arithmetic handles: the residue field F_{p^{2m}}, the truncated
/// unramified ring over it, the rational-integer column Z/p^N, and a square
/// root of delta living in the quadratic subring.
pub struct Context {
    pub cfg: PrimeConfig,
    pub fq: Arc<Fq>,
    pub w: Arc<WittRing>,
    pub zp: Arc<WittRing>,
    /// sqrt(delta) in the big ring; the Frobenius lift negates it.
    pub delta_w: WittEl,
    /// sqrt(delta) in the residue field.
    pub delta_fq: FqEl,
}

impl Context {
    pub fn new(cfg: PrimeConfig) -> Result<Context> {
        cfg.validate()?;
        let fq = Arc::new(Fq::new(cfg.p, 2 * cfg.m)?);
        let w = WittRing::with_guard(fq.clone(), cfg.precision, cfg.budget)?;
        let fp = Arc::new(Fq::new(cfg.p, 1)?);
        let zp = WittRing::with_guard(fp, cfg.precision, cfg.budget)?;
        let root = w
            .sqrt_unit(&w.from_u64(cfg.delta))
            .ok_or_else(|| Error::ConfigInvalid("delta has no square root upstairs".into()))?;
        // pin the sign so runs at different precisions agree: take the root
        // whose residue is the lexicographically smaller of the pair
        let (delta_w, delta_fq) = {
            let r = w.reduce(&root);
            let rn = fq.neg(&r);
            if r <= rn {
                (root, r)
            } else {
                (w.neg(&root), rn)
            }
        };
        Ok(Context {
            cfg,
            fq,
            w,
            zp,
            delta_w,
            delta_fq,
        })
    }

    pub fn p(&self) -> u64 {
        self.cfg.p
    }

    /// Same configuration at a different precision (for stability reruns).
    pub fn at_precision(&self, n: u32) -> Result<Context> {
        let cfg = self.cfg.clone().with_precision(n)?;
        Context::new(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_validation() {
        let c = PrimeConfig::new(3).unwrap();
        assert_eq!(c.delta, 2);
        assert!(PrimeConfig::new(9).is_err());
        assert!(PrimeConfig::new(5).unwrap().with_delta(4).is_err());
        assert!(PrimeConfig::new(3).unwrap().with_precision(5).is_err());
    }

    #[test]
    fn context_has_working_delta_root() {
        let ctx = Context::new(PrimeConfig::new(3).unwrap()).unwrap();
        let w = &ctx.w;
        let sq = w.mul(&ctx.delta_w, &ctx.delta_w);
        assert_eq!(sq, w.from_u64(ctx.cfg.delta));
        assert_eq!(w.sigma(&ctx.delta_w), w.neg(&ctx.delta_w));
        let r = w.reduce(&ctx.delta_w);
        assert_eq!(ctx.fq.mul(&r, &r), ctx.fq.from_u64(2));
        assert_eq!(ctx.delta_fq, r);
    }

    #[test]
    fn legendre_matches_small_table() {
        assert_eq!(legendre(2, 3), -1);
        assert_eq!(legendre(4, 5), 1);
        assert_eq!(legendre(10, 5), 0);
        assert_eq!(legendre(-1, 3), -1);
        assert_eq!(legendre(-1, 5), 1);
    }
}
