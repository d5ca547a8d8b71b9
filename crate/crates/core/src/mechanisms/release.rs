use crate::prob::DiscreteChannel;
use crate::{Error, Result};

/// `Q(A | x_{1:n}) = (1/n) Σ 1{x_i ∈ A}`: pick one entry uniformly and release
/// it verbatim. Output set equals the alphabet.
pub fn release_one_at_random(alphabet: Vec<String>, n: usize) -> Result<DiscreteChannel> {
    let k = alphabet.len();
    DiscreteChannel::from_fn(alphabet.clone(), n, alphabet, |x| {
        let mut row = vec![0.0; k];
        for &xi in x {
            row[xi] += 1.0 / n as f64;
        }
        row
    })
}

/// Binary randomized response on one bit: keep it with probability
/// `e^ε/(1 + e^ε)`, flip it otherwise. Exactly ε-DP.
pub fn randomized_response(eps: f64) -> Result<DiscreteChannel> {
    if !(eps >= 0.0) || eps.is_infinite() {
        return Err(Error::spec(format!(
            "randomized response needs finite eps ≥ 0, got {eps}"
        )));
    }
    let flip = 1.0 / (1.0 + eps.exp());
    let bits = vec!["0".to_string(), "1".to_string()];
    DiscreteChannel::new(
        bits.clone(),
        1,
        bits,
        vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::tv_distance;

    fn labels(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn neighbour_rows_are_one_over_n_apart() {
        let q = release_one_at_random(labels(3), 4).unwrap();
        for pair in q.neighbor_pairs() {
            let tv = tv_distance(&q.row_distribution(pair.a), &q.row_distribution(pair.b)).unwrap();
            assert!((tv - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn single_entry_is_identity() {
        assert_eq!(
            release_one_at_random(labels(3), 1).unwrap(),
            DiscreteChannel::identity(labels(3)).unwrap()
        );
    }

    #[test]
    fn cap_exceeded() {
        assert!(matches!(
            release_one_at_random(labels(10), 5),
            Err(Error::Resource(_))
        ));
    }
}
