use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::distribution::{product_distribution_with_cap, validate_probs};
use super::{FiniteDistribution, DEFAULT_ENUMERATION_CAP};
use crate::{Error, Result};

/// A probability kernel `Q(· | x_{1:n})` from `X^n` to a finite output set.
///
/// Rows are stored in canonical dataset order: dataset `x_{1:n}` is read as a
/// base-`|X|` numeral with `x_1` the most significant digit. The JSON form
/// keys each row by the comma-joined labels of its dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel", into = "RawChannel")]
pub struct DiscreteChannel {
    input_alphabet: Vec<String>,
    n: usize,
    output_set: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// Two datasets at Hamming distance one, `a < b` in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborPair {
    pub a: usize,
    pub b: usize,
    /// Coordinate at which the two datasets differ.
    pub coordinate: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    input_alphabet: Vec<String>,
    n: usize,
    output_set: Vec<String>,
    rows: IndexMap<String, Vec<f64>>,
}

impl TryFrom<RawChannel> for DiscreteChannel {
    type Error = Error;

    fn try_from(mut raw: RawChannel) -> Result<Self> {
        let count = dataset_count(raw.input_alphabet.len(), raw.n, DEFAULT_ENUMERATION_CAP)?;
        if raw.rows.len() != count {
            return Err(Error::spec(format!(
                "expected {count} rows, found {}",
                raw.rows.len()
            )));
        }
        let mut rows = Vec::with_capacity(count);
        for index in 0..count {
            let key = key_for(&raw.input_alphabet, raw.n, index);
            let row = raw
                .rows
                .swap_remove(&key)
                .ok_or_else(|| Error::spec(format!("missing row for dataset {key:?}")))?;
            rows.push(row);
        }
        DiscreteChannel::new(raw.input_alphabet, raw.n, raw.output_set, rows)
    }
}

impl From<DiscreteChannel> for RawChannel {
    fn from(q: DiscreteChannel) -> Self {
        let keys = q.dataset_keys();
        let rows = keys.into_iter().zip(q.rows).collect();
        RawChannel {
            input_alphabet: q.input_alphabet,
            n: q.n,
            output_set: q.output_set,
            rows,
        }
    }
}

fn dataset_count(alphabet: usize, n: usize, cap: usize) -> Result<usize> {
    if alphabet == 0 || n == 0 {
        return Err(Error::spec("channel needs a nonempty alphabet and n ≥ 1"));
    }
    u32::try_from(n)
        .ok()
        .and_then(|n| alphabet.checked_pow(n))
        .filter(|c| *c <= cap)
        .ok_or_else(|| Error::resource(format!("|X|^n = {alphabet}^{n} exceeds cap {cap}")))
}

fn key_for(alphabet: &[String], n: usize, index: usize) -> String {
    decode(alphabet.len(), n, index)
        .into_iter()
        .map(|d| alphabet[d].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

fn decode(base: usize, n: usize, mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; n];
    for slot in digits.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    digits
}

fn check_labels(labels: &[String], what: &str) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::spec(format!("{what} is empty")));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if l.is_empty() || l.contains(',') {
            return Err(Error::spec(format!(
                "{what} label {l:?} is empty or contains ','"
            )));
        }
        if !seen.insert(l) {
            return Err(Error::spec(format!("duplicate {what} label {l:?}")));
        }
    }
    Ok(())
}

impl DiscreteChannel {
    pub fn new(
        input_alphabet: Vec<String>,
        n: usize,
        output_set: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::new_with_cap(input_alphabet, n, output_set, rows, DEFAULT_ENUMERATION_CAP)
    }

    pub fn new_with_cap(
        input_alphabet: Vec<String>,
        n: usize,
        output_set: Vec<String>,
        rows: Vec<Vec<f64>>,
        cap: usize,
    ) -> Result<Self> {
        check_labels(&input_alphabet, "input alphabet")?;
        check_labels(&output_set, "output set")?;
        let count = dataset_count(input_alphabet.len(), n, cap)?;
        if rows.len() != count {
            return Err(Error::spec(format!(
                "expected {count} rows, got {}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != output_set.len() {
                return Err(Error::spec(format!(
                    "row {i} has {} entries for {} outputs",
                    row.len(),
                    output_set.len()
                )));
            }
            validate_probs(row)
                .map_err(|e| Error::spec(format!("row {}: {e}", key_for(&input_alphabet, n, i))))?;
        }
        Ok(DiscreteChannel {
            input_alphabet,
            n,
            output_set,
            rows,
        })
    }

    /// Tabulates `row(dataset)` for every dataset in canonical order.
    pub fn from_fn<F>(
        input_alphabet: Vec<String>,
        n: usize,
        output_set: Vec<String>,
        mut row: F,
    ) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<f64>,
    {
        let count = dataset_count(input_alphabet.len(), n, DEFAULT_ENUMERATION_CAP)?;
        let base = input_alphabet.len();
        let rows = (0..count).map(|i| row(&decode(base, n, i))).collect();
        Self::new(input_alphabet, n, output_set, rows)
    }

    /// Every dataset maps to the same output distribution.
    pub fn constant(
        input_alphabet: Vec<String>,
        n: usize,
        output_set: Vec<String>,
        row: Vec<f64>,
    ) -> Result<Self> {
        Self::from_fn(input_alphabet, n, output_set, |_| row.clone())
    }

    /// Releases its single input unchanged (`n = 1`, outputs = alphabet).
    pub fn identity(alphabet: Vec<String>) -> Result<Self> {
        let k = alphabet.len();
        Self::from_fn(alphabet.clone(), 1, alphabet, |x| {
            let mut row = vec![0.0; k];
            row[x[0]] = 1.0;
            row
        })
    }

    pub fn input_alphabet(&self) -> &[String] {
        &self.input_alphabet
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn output_set(&self) -> &[String] {
        &self.output_set
    }

    pub fn dataset_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, dataset: usize) -> &[f64] {
        &self.rows[dataset]
    }

    pub fn row_distribution(&self, dataset: usize) -> FiniteDistribution {
        FiniteDistribution::new(self.output_set.clone(), self.rows[dataset].clone())
            .expect("rows are validated on construction")
    }

    /// Alphabet indices of the dataset at canonical position `index`.
    pub fn dataset(&self, index: usize) -> Vec<usize> {
        decode(self.input_alphabet.len(), self.n, index)
    }

    pub fn index_of(&self, dataset: &[usize]) -> Result<usize> {
        let base = self.input_alphabet.len();
        if dataset.len() != self.n || dataset.iter().any(|&d| d >= base) {
            return Err(Error::domain(
                "dataset does not belong to this channel's input space",
            ));
        }
        Ok(dataset.iter().fold(0, |acc, &d| acc * base + d))
    }

    /// Comma-joined labels of the dataset at canonical position `index`.
    pub fn key(&self, index: usize) -> String {
        key_for(&self.input_alphabet, self.n, index)
    }

    pub fn dataset_keys(&self) -> Vec<String> {
        (0..self.dataset_count()).map(|i| self.key(i)).collect()
    }

    /// All unordered pairs of datasets at Hamming distance exactly one.
    pub fn neighbor_pairs(&self) -> Vec<NeighborPair> {
        let base = self.input_alphabet.len();
        let mut pairs = Vec::new();
        for a in 0..self.dataset_count() {
            let mut weight = 1;
            for coordinate in (0..self.n).rev() {
                let digit = a / weight % base;
                for higher in digit + 1..base {
                    pairs.push(NeighborPair {
                        a,
                        b: a + (higher - digit) * weight,
                        coordinate,
                    });
                }
                weight *= base;
            }
        }
        pairs
    }

    /// Row-wise mixture `λ·self + (1 − λ)·other` on the same spaces.
    pub fn mix(&self, other: &DiscreteChannel, lambda: f64) -> Result<DiscreteChannel> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::spec("mixing weight must lie in [0, 1]"));
        }
        if self.input_alphabet != other.input_alphabet
            || self.n != other.n
            || self.output_set != other.output_set
        {
            return Err(Error::domain("cannot mix channels on different spaces"));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(r, s)| {
                let mixed: Vec<f64> = r
                    .iter()
                    .zip(s)
                    .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                    .collect();
                let total: f64 = mixed.iter().sum();
                mixed.into_iter().map(|v| v / total).collect()
            })
            .collect();
        DiscreteChannel::new(
            self.input_alphabet.clone(),
            self.n,
            self.output_set.clone(),
            rows,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Distribution of `X_{1:n}` with independent coordinates `X_i ~ components[i]`,
/// laid out on the channel's dataset space.
pub fn dataset_distribution(
    q: &DiscreteChannel,
    components: &[FiniteDistribution],
) -> Result<FiniteDistribution> {
    if components.len() != q.n {
        return Err(Error::domain(format!(
            "{} components for a channel with n = {}",
            components.len(),
            q.n
        )));
    }
    if components
        .iter()
        .any(|c| c.outcomes() != q.input_alphabet.as_slice())
    {
        return Err(Error::domain(
            "component distributions must live on the channel's input alphabet",
        ));
    }
    product_distribution_with_cap(components, q.dataset_count())
}

/// `M(A) = Σ_x Q(A | x) pn(x)`: the law of the released output when the
/// dataset is drawn from `pn`.
pub fn channel_marginal(
    q: &DiscreteChannel,
    pn: &FiniteDistribution,
) -> Result<FiniteDistribution> {
    if pn.len() != q.dataset_count() || pn.outcomes() != q.dataset_keys().as_slice() {
        return Err(Error::domain(
            "dataset distribution does not live on the channel's dataset space",
        ));
    }
    let mut out = vec![0.0; q.output_set.len()];
    for (w, row) in pn.probs().iter().zip(&q.rows) {
        if *w == 0.0 {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o += w * r;
        }
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|o| *o /= total);
    FiniteDistribution::new(q.output_set.clone(), out)
}

/// `(outer ∘ inner)(· | x) = Σ_y inner(y | x) outer(· | y)`.
///
/// `outer` is a kernel on `inner`'s output set, i.e. a channel with `n = 1`
/// whose input alphabet equals `inner.output_set()`.
pub fn compose_channels(
    outer: &DiscreteChannel,
    inner: &DiscreteChannel,
) -> Result<DiscreteChannel> {
    if outer.n != 1 || outer.input_alphabet != inner.output_set {
        return Err(Error::domain(
            "outer channel must be a kernel on the inner channel's output set",
        ));
    }
    let width = outer.output_set.len();
    let rows = inner
        .rows
        .iter()
        .map(|row| {
            let mut out = vec![0.0; width];
            for (p, kernel_row) in row.iter().zip(&outer.rows) {
                for (o, k) in out.iter_mut().zip(kernel_row) {
                    *o += p * k;
                }
            }
            let total: f64 = out.iter().sum();
            out.into_iter().map(|v| v / total).collect()
        })
        .collect();
    DiscreteChannel::new(
        inner.input_alphabet.clone(),
        inner.n,
        outer.output_set.clone(),
        rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(prefix: &str, k: usize) -> Vec<String> {
        (0..k).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn canonical_order_and_keys() {
        let q =
            DiscreteChannel::constant(labels("x", 3), 2, labels("t", 2), vec![0.5, 0.5]).unwrap();
        assert_eq!(q.dataset_count(), 9);
        assert_eq!(q.key(0), "x0,x0");
        assert_eq!(q.key(5), "x1,x2");
        assert_eq!(q.dataset(5), vec![1, 2]);
        assert_eq!(q.index_of(&[1, 2]).unwrap(), 5);
    }

    #[test]
    fn neighbor_pairs_are_exactly_hamming_one() {
        let q = DiscreteChannel::constant(labels("x", 3), 3, labels("t", 1), vec![1.0]).unwrap();
        let pairs = q.neighbor_pairs();
        // 27 datasets, each with 3·2 neighbours, each pair counted once.
        assert_eq!(pairs.len(), 27 * 6 / 2);
        for p in pairs {
            let (a, b) = (q.dataset(p.a), q.dataset(p.b));
            let diff: Vec<usize> = (0..3).filter(|&i| a[i] != b[i]).collect();
            assert_eq!(diff, vec![p.coordinate]);
            assert!(p.a < p.b);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let r = DiscreteChannel::constant(labels("x", 10), 5, labels("t", 1), vec![1.0]);
        assert!(matches!(r, Err(Error::Resource(_))));
    }

    #[test]
    fn identity_marginal_is_input() {
        let q = DiscreteChannel::identity(labels("x", 3)).unwrap();
        let pn = FiniteDistribution::new(q.dataset_keys(), vec![0.2, 0.5, 0.3]).unwrap();
        let m = channel_marginal(&q, &pn).unwrap();
        assert_eq!(m.probs(), pn.probs());
    }

    #[test]
    fn constant_marginal_is_row() {
        let row = vec![0.1, 0.2, 0.7];
        let q = DiscreteChannel::constant(labels("x", 2), 2, labels("t", 3), row.clone()).unwrap();
        let pn = FiniteDistribution::new(q.dataset_keys(), vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        for (a, b) in channel_marginal(&q, &pn).unwrap().probs().iter().zip(&row) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn two_by_two_marginal_by_hand() {
        let q = DiscreteChannel::new(
            labels("x", 2),
            1,
            labels("t", 2),
            vec![vec![0.9, 0.1], vec![0.3, 0.7]],
        )
        .unwrap();
        let pn = FiniteDistribution::new(q.dataset_keys(), vec![0.25, 0.75]).unwrap();
        let m = channel_marginal(&q, &pn).unwrap();
        assert!((m.prob(0) - (0.25 * 0.9 + 0.75 * 0.3)).abs() < 1e-15);
        assert!((m.prob(1) - (0.25 * 0.1 + 0.75 * 0.7)).abs() < 1e-15);
    }

    #[test]
    fn composition_with_identity_and_constant() {
        let inner = DiscreteChannel::new(
            labels("x", 2),
            1,
            labels("t", 2),
            vec![vec![0.9, 0.1], vec![0.3, 0.7]],
        )
        .unwrap();
        let id = DiscreteChannel::identity(labels("t", 2)).unwrap();
        assert_eq!(compose_channels(&id, &inner).unwrap(), inner);
        let constant =
            DiscreteChannel::constant(labels("t", 2), 1, labels("z", 3), vec![0.2, 0.3, 0.5])
                .unwrap();
        let c = compose_channels(&constant, &inner).unwrap();
        for row in c.rows() {
            assert!(row
                .iter()
                .zip([0.2, 0.3, 0.5])
                .all(|(a, b)| (a - b).abs() < 1e-15));
        }
        assert!(matches!(
            compose_channels(&inner, &constant),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let q = DiscreteChannel::new(
            labels("x", 2),
            2,
            labels("t", 2),
            vec![
                vec![1.0, 0.0],
                vec![0.5, 0.5],
                vec![0.5, 0.5],
                vec![0.0, 1.0],
            ],
        )
        .unwrap();
        let text = q.to_json().unwrap();
        assert!(text.contains("\"x0,x1\""));
        assert_eq!(DiscreteChannel::from_json(&text).unwrap(), q);

        let missing =
            r#"{"input_alphabet":["a","b"],"n":1,"output_set":["u"],"rows":{"a":[1.0],"c":[1.0]}}"#;
        assert!(DiscreteChannel::from_json(missing).is_err());
        let extra = r#"{"input_alphabet":["a"],"n":1,"output_set":["u"],"rows":{"a":[1.0]},"x":1}"#;
        assert!(DiscreteChannel::from_json(extra).is_err());
        let unnormalised =
            r#"{"input_alphabet":["a"],"n":1,"output_set":["u","v"],"rows":{"a":[0.5,0.6]}}"#;
        assert!(DiscreteChannel::from_json(unnormalised).is_err());
    }
}
