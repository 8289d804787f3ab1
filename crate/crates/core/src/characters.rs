//! Dirichlet characters of prime modulus, indexed by their exponent `j`
//! against the smallest primitive root: `χ_j(g^k) = e(jk/(q−1))`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{ArithError, DlogTable};
use crate::special::{e_of_real, Complex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{0} is undefined for the principal character")]
    Principal(&'static str),
    #[error("character index {j} out of range for modulus {q}")]
    IndexRange { q: u64, j: u64 },
}

/// Shared per-modulus tables: discrete logs plus the `(q−1)`-th roots of unity.
#[derive(Debug)]
struct Tables {
    dlog: DlogTable,
    roots: Vec<Complex>,
}

/// All characters modulo one prime `q`. Cheap to clone.
#[derive(Debug, Clone)]
pub struct CharacterFamily {
    tables: Arc<Tables>,
}

impl CharacterFamily {
    pub fn new(q: u64) -> Result<Self, CharacterError> {
        let dlog = DlogTable::new(q)?;
        let order = q - 1;
        let roots = (0..order)
            .map(|m| e_of_real(m as f64 / order as f64))
            .collect();
        Ok(Self {
            tables: Arc::new(Tables { dlog, roots }),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.tables.dlog.modulus()
    }

    pub fn generator(&self) -> u64 {
        self.tables.dlog.generator()
    }

    pub fn dlog(&self) -> &DlogTable {
        &self.tables.dlog
    }

    /// `e(m/(q−1))`.
    pub fn root_of_unity(&self, m: u64) -> Complex {
        self.tables.roots[(m % (self.modulus() - 1)) as usize]
    }

    pub fn character(&self, j: u64) -> Result<DirichletCharacter, CharacterError> {
        let q = self.modulus();
        if j >= q - 1 {
            return Err(CharacterError::IndexRange { q, j });
        }
        Ok(DirichletCharacter {
            j,
            family: self.clone(),
        })
    }

    /// The `q − 2` non-principal characters `j = 1..=q−2`.
    pub fn non_principal(&self) -> impl Iterator<Item = DirichletCharacter> + '_ {
        (1..self.modulus() - 1).map(move |j| DirichletCharacter {
            j,
            family: self.clone(),
        })
    }

    pub fn size(&self) -> usize {
        self.modulus() as usize - 2
    }
}

/// Audit identity of a character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharacterId {
    pub q: u64,
    pub j: u64,
    pub g: u64,
}

#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    j: u64,
    family: CharacterFamily,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.family.modulus()
    }

    pub fn index(&self) -> u64 {
        self.j
    }

    pub fn family(&self) -> &CharacterFamily {
        &self.family
    }

    pub fn id(&self) -> CharacterId {
        CharacterId {
            q: self.modulus(),
            j: self.j,
            g: self.family.generator(),
        }
    }

    pub fn is_principal(&self) -> bool {
        self.j == 0
    }

    /// `χ̄ = χ_{q−1−j}`.
    pub fn conjugate(&self) -> DirichletCharacter {
        let order = self.modulus() - 1;
        DirichletCharacter {
            j: (order - self.j) % order,
            family: self.family.clone(),
        }
    }

    /// `χ(n)`; zero when `q | n`.
    pub fn value(&self, n: i64) -> Complex {
        let q = self.modulus() as i64;
        let r = n.rem_euclid(q) as u64;
        match self.family.dlog().log(r) {
            None => Complex::new(0.0, 0.0),
            Some(k) => self.family.root_of_unity(self.j * k as u64),
        }
    }

    /// `a(χ)`: 0 for even, 1 for odd characters. Equals `j mod 2`.
    pub fn parity(&self) -> u8 {
        (self.j % 2) as u8
    }

    /// `τ(χ) = Σ_{k=1}^{q−1} χ(k) e(k/q)`.
    pub fn gauss_sum(&self) -> Result<Complex, CharacterError> {
        if self.is_principal() {
            return Err(CharacterError::Principal("gauss_sum"));
        }
        Ok(self.gauss_sum_unchecked())
    }

    fn gauss_sum_unchecked(&self) -> Complex {
        let q = self.modulus();
        let step = 2.0 * PI / q as f64;
        (1..q)
            .map(|k| {
                let (s, c) = (step * k as f64).sin_cos();
                self.value(k as i64) * Complex::new(c, s)
            })
            .sum()
    }

    pub fn functional_equation_data(&self) -> Result<FunctionalEquationData, CharacterError> {
        let gauss_sum = self.gauss_sum()?;
        let parity = self.parity();
        let i_pow = if parity == 0 {
            Complex::new(1.0, 0.0)
        } else {
            Complex::new(0.0, 1.0)
        };
        let sign = gauss_sum / (i_pow * (self.modulus() as f64).sqrt());
        Ok(FunctionalEquationData {
            gauss_sum,
            parity,
            sign,
        })
    }
}

/// Data of `Λ(s,χ) = ε(χ) Λ(1−s, χ̄)` with `ε(χ) = τ(χ)/(i^{a(χ)} √q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalEquationData {
    pub gauss_sum: Complex,
    pub parity: u8,
    pub sign: Complex,
}

pub fn char_value(chi: &DirichletCharacter, n: i64) -> Complex {
    chi.value(n)
}

pub fn parity(chi: &DirichletCharacter) -> u8 {
    chi.parity()
}

pub fn gauss_sum(chi: &DirichletCharacter) -> Result<Complex, CharacterError> {
    chi.gauss_sum()
}

pub fn functional_equation_data(
    chi: &DirichletCharacter,
) -> Result<FunctionalEquationData, CharacterError> {
    chi.functional_equation_data()
}

/// `Σ_{χ∈F(q)} χ(r)` by orthogonality: `−1 + (q−1)[r ≡ 1 mod q]` for
/// `(r, q) = 1`, and `0` when `q | r`.
pub fn family_char_sum(q: u64, r: i64) -> i64 {
    let rr = r.rem_euclid(q as i64);
    match rr {
        0 => 0,
        1 => q as i64 - 2,
        _ => -1,
    }
}

/// The same sum evaluated character by character.
pub fn family_char_sum_brute(family: &CharacterFamily, r: i64) -> Complex {
    family.non_principal().map(|chi| chi.value(r)).sum()
}
