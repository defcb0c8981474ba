use serde::Serialize;

use super::probe::{Neck, NeckComponent};
use crate::ends::{ClusterVerdict, EndFunction};
use crate::error::{Error, Result};
use crate::truncation::Truncation;

/// Regular necks see clusters of one value everywhere except possibly one
/// non-cluster component; special necks are the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NeckClass {
    Regular {
        theta: u8,
    },
    /// At most one non-cluster component, and clusters of both values.
    SpecialType1,
    /// At least two non-cluster components.
    SpecialType2,
}

impl NeckClass {
    pub fn is_special(self) -> bool {
        !matches!(self, NeckClass::Regular { .. })
    }

    pub fn label(self) -> &'static str {
        match self {
            NeckClass::Regular { theta: 0 } => "regular_0",
            NeckClass::Regular { .. } => "regular_1",
            NeckClass::SpecialType1 => "special_type_1",
            NeckClass::SpecialType2 => "special_type_2",
        }
    }
}

/// Verdict of one unbounded component from the end classes it meets.
pub fn component_verdict(c: &NeckComponent, chi: &EndFunction) -> ClusterVerdict {
    let mut seen = [false; 2];
    for &k in &c.end_classes {
        seen[chi.value(k as usize) as usize] = true;
    }
    ClusterVerdict::from_values(seen[0], seen[1], true)
}

fn decided(verdicts: &[ClusterVerdict]) -> NeckClass {
    let mut non = 0;
    let mut has = [false; 2];
    for v in verdicts {
        match v {
            ClusterVerdict::Cluster(th) => has[*th as usize] = true,
            _ => non += 1,
        }
    }
    if non >= 2 {
        NeckClass::SpecialType2
    } else if has[0] && has[1] {
        NeckClass::SpecialType1
    } else {
        NeckClass::Regular { theta: u8::from(has[1]) }
    }
}

// Above this many completions an undetermined neck is reported as such.
const MAX_COMPLETIONS: usize = 1 << 12;

/// Class from the verdicts of the unbounded components. Undetermined
/// verdicts are completed in every possible way; `None` when the
/// completions disagree.
pub fn classify_verdicts(verdicts: &[ClusterVerdict]) -> Option<NeckClass> {
    let options: Vec<Vec<ClusterVerdict>> = verdicts.iter().map(|v| v.options()).collect();
    let total: usize = options.iter().map(Vec::len).try_fold(1usize, |a, b| a.checked_mul(b))?;
    if total > MAX_COMPLETIONS {
        return None;
    }
    let mut idx = vec![0usize; options.len()];
    let mut answer: Option<NeckClass> = None;
    loop {
        let pick: Vec<ClusterVerdict> = idx.iter().zip(&options).map(|(&i, o)| o[i]).collect();
        let c = decided(&pick);
        match answer {
            None => answer = Some(c),
            Some(a) if a != c => return None,
            _ => {}
        }
        // Odometer increment.
        let mut k = 0;
        loop {
            if k == idx.len() {
                return answer;
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn classify_neck(t: &Truncation, neck: &Neck, chi: &EndFunction) -> Result<NeckClass> {
    let verdicts: Vec<ClusterVerdict> = neck.unbounded_components().map(|c| component_verdict(c, chi)).collect();
    classify_verdicts(&verdicts).ok_or_else(|| Error::Undecidable { center: t.word_string(neck.center) })
}
