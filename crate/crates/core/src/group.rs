//! Finite groups used as coefficients for discrete forms.
//!
//! Composition is written left to right: `compose(a, b)` is `a * b`.
//! For permutations that means "apply `a`, then `b`".

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::format::FormatError;

pub trait Group: Clone + Debug {
    type Elem: Clone + Eq + Hash + Debug;

    fn identity(&self) -> Self::Elem;
    fn compose(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Self::Elem;
    fn encode(&self, a: &Self::Elem) -> Value;
    fn decode(&self, v: &Value) -> Result<Self::Elem, FormatError>;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    /// `a^-1 * b`, the Darboux difference.
    fn divide_left(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.compose(&self.invert(a), b)
    }
}

/// The symmetric group on `{0, .., degree-1}`, elements as image arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symmetric {
    pub degree: usize,
}

impl Group for Symmetric {
    type Elem = Vec<u8>;

    fn identity(&self) -> Vec<u8> {
        (0..self.degree as u8).collect()
    }

    fn compose(&self, a: &Vec<u8>, b: &Vec<u8>) -> Vec<u8> {
        a.iter().map(|&i| b[i as usize]).collect()
    }

    fn invert(&self, a: &Vec<u8>) -> Vec<u8> {
        let mut out = vec![0; a.len()];
        for (i, &j) in a.iter().enumerate() {
            out[j as usize] = i as u8;
        }
        out
    }

    fn encode(&self, a: &Vec<u8>) -> Value {
        Value::from(a.iter().map(|&i| i as u64).collect::<Vec<_>>())
    }

    fn decode(&self, v: &Value) -> Result<Vec<u8>, FormatError> {
        let err = || FormatError::invalid(format!("not a permutation of degree {}: {v}", self.degree));
        let arr = v.as_array().ok_or_else(err)?;
        if arr.len() != self.degree {
            return Err(err());
        }
        let mut seen = vec![false; self.degree];
        let mut out = Vec::with_capacity(self.degree);
        for x in arr {
            let i = x.as_u64().filter(|&i| (i as usize) < self.degree).ok_or_else(err)? as usize;
            if std::mem::replace(&mut seen[i], true) {
                return Err(err());
            }
            out.push(i as u8);
        }
        Ok(out)
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        use rand::seq::SliceRandom;
        let mut p = self.identity();
        p.shuffle(rng);
        p
    }
}

/// `Z_m` written additively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cyclic {
    pub modulus: u64,
}

impl Group for Cyclic {
    type Elem = u64;

    fn identity(&self) -> u64 {
        0
    }

    fn compose(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.modulus
    }

    fn invert(&self, a: &u64) -> u64 {
        (self.modulus - a) % self.modulus
    }

    fn encode(&self, a: &u64) -> Value {
        Value::from(*a)
    }

    fn decode(&self, v: &Value) -> Result<u64, FormatError> {
        v.as_u64()
            .filter(|&a| a < self.modulus)
            .ok_or_else(|| FormatError::invalid(format!("not an element of Z_{}: {v}", self.modulus)))
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.modulus)
    }
}

/// Invertible 2x2 matrices over `Z_p`, row-major `[a, b, c, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Matrix2 {
    pub modulus: u64,
}

impl Matrix2 {
    fn det(&self, m: &[u64; 4]) -> u64 {
        let p = self.modulus;
        (m[0] * m[3] % p + p - m[1] * m[2] % p) % p
    }

    fn inv_mod(&self, a: u64) -> u64 {
        // p is prime, so a^(p-2) inverts a
        let mut result = 1;
        let mut base = a % self.modulus;
        let mut e = self.modulus - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % self.modulus;
            }
            base = base * base % self.modulus;
            e >>= 1;
        }
        result
    }
}

impl Group for Matrix2 {
    type Elem = [u64; 4];

    fn identity(&self) -> [u64; 4] {
        [1, 0, 0, 1]
    }

    fn compose(&self, a: &[u64; 4], b: &[u64; 4]) -> [u64; 4] {
        let p = self.modulus;
        [
            (a[0] * b[0] + a[1] * b[2]) % p,
            (a[0] * b[1] + a[1] * b[3]) % p,
            (a[2] * b[0] + a[3] * b[2]) % p,
            (a[2] * b[1] + a[3] * b[3]) % p,
        ]
    }

    fn invert(&self, a: &[u64; 4]) -> [u64; 4] {
        let p = self.modulus;
        let di = self.inv_mod(self.det(a));
        [
            a[3] * di % p,
            (p - a[1]) % p * di % p,
            (p - a[2]) % p * di % p,
            a[0] * di % p,
        ]
    }

    fn encode(&self, a: &[u64; 4]) -> Value {
        Value::from(a.to_vec())
    }

    fn decode(&self, v: &Value) -> Result<[u64; 4], FormatError> {
        let err = || FormatError::invalid(format!("not an invertible 2x2 matrix mod {}: {v}", self.modulus));
        let arr = v.as_array().filter(|a| a.len() == 4).ok_or_else(err)?;
        let mut m = [0; 4];
        for (slot, x) in m.iter_mut().zip(arr) {
            *slot = x.as_u64().filter(|&x| x < self.modulus).ok_or_else(err)?;
        }
        if self.det(&m) == 0 {
            return Err(err());
        }
        Ok(m)
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> [u64; 4] {
        loop {
            let m = [(); 4].map(|_| rng.gen_range(0..self.modulus));
            if self.det(&m) != 0 {
                return m;
            }
        }
    }
}

/// Group description as stored in files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSpec {
    Symmetric { degree: usize },
    Cyclic { modulus: u64 },
    Matrix { modulus: u64 },
}

/// A group chosen at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnyGroup {
    Symmetric(Symmetric),
    Cyclic(Cyclic),
    Matrix(Matrix2),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Perm(Vec<u8>),
    Int(u64),
    Mat([u64; 4]),
}

impl AnyGroup {
    pub fn from_spec(spec: GroupSpec) -> Result<Self, FormatError> {
        match spec {
            GroupSpec::Symmetric { degree } if (1..=255).contains(&degree) => {
                Ok(AnyGroup::Symmetric(Symmetric { degree }))
            }
            GroupSpec::Cyclic { modulus } if modulus >= 1 && modulus <= u32::MAX as u64 => {
                Ok(AnyGroup::Cyclic(Cyclic { modulus }))
            }
            GroupSpec::Matrix { modulus } if is_prime(modulus) && modulus < 1 << 16 => {
                Ok(AnyGroup::Matrix(Matrix2 { modulus }))
            }
            other => Err(FormatError::invalid(format!("unsupported group {other:?}"))),
        }
    }

    pub fn spec(&self) -> GroupSpec {
        match self {
            AnyGroup::Symmetric(g) => GroupSpec::Symmetric { degree: g.degree },
            AnyGroup::Cyclic(g) => GroupSpec::Cyclic { modulus: g.modulus },
            AnyGroup::Matrix(g) => GroupSpec::Matrix { modulus: g.modulus },
        }
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl Group for AnyGroup {
    type Elem = Element;

    fn identity(&self) -> Element {
        match self {
            AnyGroup::Symmetric(g) => Element::Perm(g.identity()),
            AnyGroup::Cyclic(g) => Element::Int(g.identity()),
            AnyGroup::Matrix(g) => Element::Mat(g.identity()),
        }
    }

    fn compose(&self, a: &Element, b: &Element) -> Element {
        match (self, a, b) {
            (AnyGroup::Symmetric(g), Element::Perm(a), Element::Perm(b)) => Element::Perm(g.compose(a, b)),
            (AnyGroup::Cyclic(g), Element::Int(a), Element::Int(b)) => Element::Int(g.compose(a, b)),
            (AnyGroup::Matrix(g), Element::Mat(a), Element::Mat(b)) => Element::Mat(g.compose(a, b)),
            _ => panic!("element kind does not match group {self:?}"),
        }
    }

    fn invert(&self, a: &Element) -> Element {
        match (self, a) {
            (AnyGroup::Symmetric(g), Element::Perm(a)) => Element::Perm(g.invert(a)),
            (AnyGroup::Cyclic(g), Element::Int(a)) => Element::Int(g.invert(a)),
            (AnyGroup::Matrix(g), Element::Mat(a)) => Element::Mat(g.invert(a)),
            _ => panic!("element kind does not match group {self:?}"),
        }
    }

    fn encode(&self, a: &Element) -> Value {
        match (self, a) {
            (AnyGroup::Symmetric(g), Element::Perm(a)) => g.encode(a),
            (AnyGroup::Cyclic(g), Element::Int(a)) => g.encode(a),
            (AnyGroup::Matrix(g), Element::Mat(a)) => g.encode(a),
            _ => panic!("element kind does not match group {self:?}"),
        }
    }

    fn decode(&self, v: &Value) -> Result<Element, FormatError> {
        Ok(match self {
            AnyGroup::Symmetric(g) => Element::Perm(g.decode(v)?),
            AnyGroup::Cyclic(g) => Element::Int(g.decode(v)?),
            AnyGroup::Matrix(g) => Element::Mat(g.decode(v)?),
        })
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        match self {
            AnyGroup::Symmetric(g) => Element::Perm(g.random(rng)),
            AnyGroup::Cyclic(g) => Element::Int(g.random(rng)),
            AnyGroup::Matrix(g) => Element::Mat(g.random(rng)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_axioms<G: Group>(g: &G, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = g.identity();
        for _ in 0..200 {
            let (a, b, c) = (g.random(&mut rng), g.random(&mut rng), g.random(&mut rng));
            assert_eq!(g.compose(&g.compose(&a, &b), &c), g.compose(&a, &g.compose(&b, &c)));
            assert_eq!(g.compose(&a, &e), a);
            assert_eq!(g.compose(&e, &a), a);
            assert_eq!(g.compose(&a, &g.invert(&a)), e);
            assert_eq!(g.compose(&g.invert(&a), &a), e);
            assert_eq!(g.decode(&g.encode(&a)).unwrap(), a);
        }
    }

    #[test]
    fn shipped_groups_are_groups() {
        check_axioms(&Symmetric { degree: 4 }, 1);
        check_axioms(&Cyclic { modulus: 12 }, 2);
        check_axioms(&Matrix2 { modulus: 5 }, 3);
        check_axioms(&AnyGroup::Matrix(Matrix2 { modulus: 7 }), 4);
    }

    #[test]
    fn permutations_compose_left_to_right() {
        let s3 = Symmetric { degree: 3 };
        let swap01 = vec![1, 0, 2];
        let cycle = vec![1, 2, 0];
        // apply (01) then (012): 0 -> 1 -> 2
        assert_eq!(s3.compose(&swap01, &cycle), vec![2, 1, 0]);
        assert_eq!(s3.invert(&cycle), vec![2, 0, 1]);
    }

    #[test]
    fn decode_rejects_bad_elements() {
        let s3 = Symmetric { degree: 3 };
        assert!(s3.decode(&serde_json::json!([0, 0, 1])).is_err());
        assert!(s3.decode(&serde_json::json!([0, 1])).is_err());
        assert!(Cyclic { modulus: 3 }.decode(&serde_json::json!(3)).is_err());
        assert!(Matrix2 { modulus: 5 }.decode(&serde_json::json!([1, 2, 2, 4])).is_err());
        assert!(AnyGroup::from_spec(GroupSpec::Matrix { modulus: 6 }).is_err());
    }
}
