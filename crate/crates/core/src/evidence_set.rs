//! On-disk evidence sets.
//!
//! ```json
//! {"frame_size": 3, "evidence": [{"id": 0, "focal": [1], "mass": 0.5}]}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{make_evidence, FocalSet, Frame, SimpleEvidence};

/// A frame together with the evidence to be clustered.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceSet {
    pub frame: Frame,
    pub evidence: Vec<SimpleEvidence>,
}

#[derive(Serialize, Deserialize)]
struct EvidenceRecord {
    id: usize,
    focal: Vec<usize>,
    mass: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvidenceSetDoc {
    frame_size: usize,
    evidence: Vec<EvidenceRecord>,
}

impl EvidenceSet {
    /// Checks that every focal set fits the frame and that ids are positions.
    pub fn new(frame: Frame, evidence: Vec<SimpleEvidence>) -> Result<Self> {
        for (position, e) in evidence.iter().enumerate() {
            if e.id != position {
                return Err(Error::BadEvidenceId { position, id: e.id });
            }
            if !frame.contains(e.focal) {
                let element = e.focal.elements().into_iter().max().unwrap_or(0);
                return Err(Error::ElementOutOfFrame {
                    element,
                    frame_size: frame.size(),
                });
            }
            make_evidence(e.focal, e.mass, e.id)?;
        }
        Ok(Self { frame, evidence })
    }

    pub fn len(&self) -> usize {
        self.evidence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.evidence.is_empty()
    }

    pub fn to_json(&self) -> String {
        let doc = EvidenceSetDoc {
            frame_size: self.frame.size(),
            evidence: self
                .evidence
                .iter()
                .map(|e| EvidenceRecord {
                    id: e.id,
                    focal: e.focal.elements(),
                    mass: e.mass,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("evidence set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: EvidenceSetDoc = serde_json::from_str(text)?;
        let frame = Frame::new(doc.frame_size)?;
        let mut evidence = Vec::with_capacity(doc.evidence.len());
        for rec in doc.evidence {
            if let Some(&bad) = rec.focal.iter().find(|&&e| e == 0 || e > frame.size()) {
                return Err(Error::ElementOutOfFrame {
                    element: bad,
                    frame_size: frame.size(),
                });
            }
            let focal = FocalSet::from_elements(rec.focal)?;
            evidence.push(make_evidence(focal, rec.mass, rec.id)?);
        }
        Self::new(frame, evidence)
    }

    pub fn load(path: &Path) -> std::io::Result<Result<Self>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_json(&text))
    }
}
