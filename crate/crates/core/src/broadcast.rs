//! The broadcast channel: one input, K receivers, a private subset.

use serde::{Deserialize, Serialize};

use crate::probkit::{ChannelMatrix, ProbError};

/// A K-receiver broadcast channel described by its per-receiver marginals.
///
/// Receivers are stored in canonical order: the `L` private receivers first
/// (in their original relative order), then the common ones. Receiver
/// indices in this API are 0-based positions in canonical order; displays
/// add one, so canonical position `i` prints as `Y{i+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroadcastSpec {
    input_size: usize,
    receivers: Vec<ChannelMatrix>,
    names: Vec<String>,
    private: usize,
    /// `original[i]` is the 0-based input position of canonical receiver `i`.
    original: Vec<usize>,
}

impl BroadcastSpec {
    /// Builds a spec with default names `Y1..YK` taken from input positions.
    pub fn new(receivers: Vec<ChannelMatrix>, private: &[usize]) -> Result<Self, ProbError> {
        let names = (1..=receivers.len()).map(|i| format!("Y{i}")).collect();
        Self::with_names(receivers, names, private)
    }

    pub fn with_names(
        receivers: Vec<ChannelMatrix>,
        names: Vec<String>,
        private: &[usize],
    ) -> Result<Self, ProbError> {
        let k = receivers.len();
        if k == 0 {
            return Err(ProbError::Empty);
        }
        assert_eq!(names.len(), k, "one name per receiver");
        let input_size = receivers[0].input_size();
        if let Some(w) = receivers.iter().find(|w| w.input_size() != input_size) {
            return Err(ProbError::DimensionMismatch {
                expected: input_size,
                found: w.input_size(),
            });
        }
        let mut is_private = vec![false; k];
        for &i in private {
            if i >= k {
                return Err(ProbError::ReceiverIndex(i));
            }
            is_private[i] = true;
        }
        let l = is_private.iter().filter(|&&p| p).count();
        if l == 0 || l >= k {
            return Err(ProbError::PrivateSetSize {
                receivers: k,
                private: l,
            });
        }
        let original: Vec<usize> = (0..k)
            .filter(|&i| is_private[i])
            .chain((0..k).filter(|&i| !is_private[i]))
            .collect();
        let receivers = original.iter().map(|&i| receivers[i].clone()).collect();
        let names = original.iter().map(|&i| names[i].clone()).collect();
        Ok(Self {
            input_size,
            receivers,
            names,
            private: l,
            original,
        })
    }

    /// Spec whose receivers are already in canonical order with the first `l` private.
    pub fn canonical(receivers: Vec<ChannelMatrix>, l: usize) -> Result<Self, ProbError> {
        Self::new(receivers, &(0..l).collect::<Vec<_>>())
    }

    /// Number of receivers `K`.
    pub fn k(&self) -> usize {
        self.receivers.len()
    }

    /// Number of private receivers `L`.
    pub fn l(&self) -> usize {
        self.private
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn receivers(&self) -> &[ChannelMatrix] {
        &self.receivers
    }

    pub fn receiver(&self, i: usize) -> &ChannelMatrix {
        &self.receivers[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Input position of canonical receiver `i`.
    pub fn original_index(&self, i: usize) -> usize {
        self.original[i]
    }

    pub fn private_range(&self) -> std::ops::Range<usize> {
        0..self.private
    }

    pub fn common_range(&self) -> std::ops::Range<usize> {
        self.private..self.k()
    }

    /// Same channel with the common receivers reordered: canonical common
    /// position `L + t` of the result is receiver `common_order[t]` of `self`.
    pub fn permute_common(&self, common_order: &[usize]) -> Self {
        assert_eq!(common_order.len(), self.k() - self.private);
        let order: Vec<usize> = self
            .private_range()
            .chain(common_order.iter().copied())
            .collect();
        self.reorder(&order)
    }

    /// Same channel with the private receivers reordered.
    pub fn permute_private(&self, private_order: &[usize]) -> Self {
        assert_eq!(private_order.len(), self.private);
        let order: Vec<usize> = private_order
            .iter()
            .copied()
            .chain(self.common_range())
            .collect();
        self.reorder(&order)
    }

    fn reorder(&self, order: &[usize]) -> Self {
        Self {
            input_size: self.input_size,
            receivers: order.iter().map(|&i| self.receivers[i].clone()).collect(),
            names: order.iter().map(|&i| self.names[i].clone()).collect(),
            private: self.private,
            original: order.iter().map(|&i| self.original[i]).collect(),
        }
    }

    /// Adds a common receiver at the end.
    pub fn with_common(&self, w: ChannelMatrix, name: &str) -> Result<Self, ProbError> {
        if w.input_size() != self.input_size {
            return Err(ProbError::DimensionMismatch {
                expected: self.input_size,
                found: w.input_size(),
            });
        }
        let mut out = self.clone();
        out.receivers.push(w);
        out.names.push(name.to_string());
        out.original.push(self.k());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalization_moves_private_first() {
        let bc = BroadcastSpec::new(
            vec![
                ChannelMatrix::bsc(0.3),
                ChannelMatrix::bsc(0.1),
                ChannelMatrix::bsc(0.2),
            ],
            &[1],
        )
        .unwrap();
        assert_eq!(bc.k(), 3);
        assert_eq!(bc.l(), 1);
        assert_eq!(bc.names(), &["Y2", "Y1", "Y3"]);
        assert_eq!(bc.original_index(0), 1);
        assert_eq!(bc.receiver(0), &ChannelMatrix::bsc(0.1));
    }

    #[test]
    fn private_set_bounds() {
        let two = vec![ChannelMatrix::bsc(0.1), ChannelMatrix::bsc(0.2)];
        assert!(matches!(
            BroadcastSpec::new(two.clone(), &[]),
            Err(ProbError::PrivateSetSize { .. })
        ));
        assert!(matches!(
            BroadcastSpec::new(two.clone(), &[0, 1]),
            Err(ProbError::PrivateSetSize { .. })
        ));
        assert!(matches!(
            BroadcastSpec::new(two, &[5]),
            Err(ProbError::ReceiverIndex(5))
        ));
        assert!(matches!(
            BroadcastSpec::new(vec![ChannelMatrix::bsc(0.1), ChannelMatrix::identity(3)], &[0]),
            Err(ProbError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn common_permutation() {
        let bc = BroadcastSpec::canonical(
            vec![
                ChannelMatrix::bsc(0.05),
                ChannelMatrix::bsc(0.1),
                ChannelMatrix::bsc(0.2),
            ],
            1,
        )
        .unwrap();
        let p = bc.permute_common(&[2, 1]);
        assert_eq!(p.names(), &["Y1", "Y3", "Y2"]);
        assert_eq!(p.receiver(1), &ChannelMatrix::bsc(0.2));
    }
}
