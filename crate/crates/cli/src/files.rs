//! JSON channel and chain files.

use std::path::Path;

use nestedcast::{BroadcastSpec, ChannelMatrix, MarkovChain, ProbVector, SearchConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverEntry {
    pub name: String,
    /// Row `x` holds `W(y|x)`.
    pub matrix: ChannelMatrix,
}

/// A receiver named directly or by its 1-based position in `receivers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReceiverRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub input_size: usize,
    pub receivers: Vec<ReceiverEntry>,
    pub private: Vec<ReceiverRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    /// Law of the top auxiliary.
    pub top: ProbVector,
    /// Kernels from each level to the next, ending at the channel input.
    pub kernels: Vec<ChannelMatrix>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn json_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    }
}

/// First line mentioning `needle`, 1-based; 1 when absent.
fn line_of(text: &str, needle: &str) -> usize {
    text.lines()
        .position(|l| l.contains(needle))
        .map_or(1, |i| i + 1)
}

impl ChannelFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let file: ChannelFile = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
        let invalid = |line: usize, message: String| CliError::Parse {
            path: path.display().to_string(),
            line,
            message,
        };
        for r in &file.receivers {
            if r.matrix.input_size() != file.input_size {
                return Err(invalid(
                    line_of(text, &format!("\"{}\"", r.name)),
                    format!(
                        "receiver {} has {} input rows, expected input_size {}",
                        r.name,
                        r.matrix.input_size(),
                        file.input_size
                    ),
                ));
            }
        }
        for (i, r) in file.receivers.iter().enumerate() {
            if file.receivers[..i].iter().any(|o| o.name == r.name) {
                return Err(invalid(
                    line_of(text, &format!("\"{}\"", r.name)),
                    format!("duplicate receiver name {}", r.name),
                ));
            }
        }
        file.private_indices()
            .map_err(|m| invalid(line_of(text, "\"private\""), m))?;
        if let Some(cfg) = &file.search {
            cfg.validate()
                .map_err(|e| invalid(line_of(text, "\"search\""), e.to_string()))?;
        }
        file.spec()
            .map_err(|e| invalid(line_of(text, "\"private\""), e.to_string()))?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read(path)?, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel file serializes")
    }

    /// 0-based indices of the private receivers.
    pub fn private_indices(&self) -> Result<Vec<usize>, String> {
        self.private
            .iter()
            .map(|r| match r {
                ReceiverRef::Index(i) if (1..=self.receivers.len()).contains(i) => Ok(i - 1),
                ReceiverRef::Index(i) => Err(format!(
                    "private receiver index {i} outside 1..={}",
                    self.receivers.len()
                )),
                ReceiverRef::Name(n) => self
                    .receivers
                    .iter()
                    .position(|r| &r.name == n)
                    .ok_or_else(|| format!("unknown private receiver {n}")),
            })
            .collect()
    }

    pub fn spec(&self) -> Result<BroadcastSpec, nestedcast::ProbError> {
        let private = self.private_indices().unwrap_or_default();
        BroadcastSpec::with_names(
            self.receivers.iter().map(|r| r.matrix.clone()).collect(),
            self.receivers.iter().map(|r| r.name.clone()).collect(),
            &private,
        )
    }
}

impl ChainFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let file: ChainFile = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
        file.chain().map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            line: line_of(text, "\"kernels\""),
            message: e.to_string(),
        })?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read(path)?, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain file serializes")
    }

    pub fn chain(&self) -> Result<MarkovChain, nestedcast::ProbError> {
        MarkovChain::new(self.top.clone(), self.kernels.clone())
    }
}

impl From<&MarkovChain> for ChainFile {
    fn from(c: &MarkovChain) -> Self {
        Self {
            top: c.top.clone(),
            kernels: c.kernels.clone(),
        }
    }
}
