//! Deterministic input generation for differential testing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::value::Value;
use super::EquivError;
use crate::syntax::Type;

const MAX_ARRAY_LEN: usize = 6;
const MAX_STRING_LEN: usize = 4;

fn boundary(ty: &Type) -> Result<Vec<Value>, EquivError> {
    Ok(match ty {
        Type::Int => [0, 1, -1, i32::MIN, i32::MAX, 2, -2].map(Value::Int).to_vec(),
        Type::Long => [0, 1, -1, i64::MIN, i64::MAX, 2, -2].map(Value::Long).to_vec(),
        Type::Double => [0.0, 1.0, -1.0, 0.5, -0.0, f64::NAN, f64::INFINITY, f64::NEG_INFINITY]
            .map(Value::Double)
            .to_vec(),
        Type::Boolean => vec![Value::Boolean(false), Value::Boolean(true)],
        Type::String => ["", "a", "ab"].map(|s| Value::String(s.into())).to_vec(),
        Type::Array(elem) => {
            let edge = boundary(elem)?;
            if elem.element().is_some() {
                return Err(EquivError::UnsupportedType(ty.clone()));
            }
            let pair = match &**elem {
                Type::Int | Type::Long | Type::Double => vec![edge[1].clone(), edge[2].clone()],
                _ => vec![edge[0].clone(), edge[1].clone()],
            };
            let extremes = match &**elem {
                Type::Int | Type::Long => vec![edge[3].clone(), edge[4].clone()],
                Type::Double => vec![edge[5].clone(), edge[6].clone()],
                _ => vec![edge[1].clone(), edge[0].clone(), edge[1].clone()],
            };
            vec![
                Value::Array(vec![]),
                Value::Array(vec![edge[0].clone()]),
                Value::Array(pair),
                Value::Array(extremes),
            ]
        }
    })
}

fn small_int<R: Rng>(rng: &mut R) -> i64 {
    match rng.gen_range(0..10) {
        0..=5 => rng.gen_range(-10..=10),
        6..=8 => rng.gen_range(-1000..=1000),
        _ => rng.gen_range(i32::MIN as i64..=i32::MAX as i64),
    }
}

fn random_value<R: Rng>(ty: &Type, rng: &mut R) -> Value {
    match ty {
        Type::Int => Value::Int(small_int(rng) as i32),
        Type::Long => Value::Long(if rng.gen_bool(0.1) {
            rng.gen()
        } else {
            small_int(rng)
        }),
        Type::Double => Value::Double(match rng.gen_range(0..10) {
            0..=4 => rng.gen_range(-10..=10) as f64 / 2.0,
            5..=8 => rng.gen_range(-1000.0..1000.0),
            _ => f64::from_bits(rng.gen()),
        }),
        Type::Boolean => Value::Boolean(rng.gen()),
        Type::String => {
            let len = rng.gen_range(0..=MAX_STRING_LEN);
            Value::String((0..len).map(|_| rng.gen_range(b'a'..=b'c') as char).collect())
        }
        Type::Array(elem) => {
            let len = rng.gen_range(0..=MAX_ARRAY_LEN);
            Value::Array((0..len).map(|_| random_value(elem, rng)).collect())
        }
    }
}

/// `n` input vectors for `signature`: a fixed boundary prefix followed by
/// values drawn from a ChaCha stream seeded with `seed`.
pub fn sample_inputs(signature: &[Type], n: usize, seed: u64) -> Result<Vec<Vec<Value>>, EquivError> {
    if n == 0 {
        return Err(EquivError::ZeroSamples);
    }
    let edges = signature.iter().map(boundary).collect::<Result<Vec<_>, _>>()?;
    let prefix = edges.iter().map(Vec::len).max().unwrap_or(1).min(n);
    let mut out = Vec::with_capacity(n);
    for i in 0..prefix {
        out.push(edges.iter().map(|e| e[i % e.len()].clone()).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < n {
        out.push(signature.iter().map(|t| random_value(t, &mut rng)).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let sig = [Type::Int, Type::array_of(Type::Double), Type::String];
        let a = sample_inputs(&sig, 50, 7).unwrap();
        assert_eq!(a.len(), 50);
        assert_eq!(a, sample_inputs(&sig, 50, 7).unwrap());
        assert_ne!(a, sample_inputs(&sig, 50, 8).unwrap());
        assert_eq!(a[0], vec![Value::Int(0), Value::Array(vec![]), Value::String("".into())]);
    }

    #[test]
    fn boundary_prefix_covers_extremes() {
        let rows = sample_inputs(&[Type::Int], 10, 1).unwrap();
        let seen: Vec<&Value> = rows.iter().map(|r| &r[0]).collect();
        assert!(seen.contains(&&Value::Int(i32::MIN)));
        assert!(seen.contains(&&Value::Int(i32::MAX)));
    }

    #[test]
    fn empty_signature_and_errors() {
        assert_eq!(sample_inputs(&[], 3, 0).unwrap(), vec![Vec::<Value>::new(); 3]);
        assert_eq!(sample_inputs(&[Type::Int], 0, 0), Err(EquivError::ZeroSamples));
        let nested = Type::array_of(Type::array_of(Type::Int));
        assert!(matches!(
            sample_inputs(&[nested], 5, 0),
            Err(EquivError::UnsupportedType(_))
        ));
    }
}
