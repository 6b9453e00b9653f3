use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Mean error and sample count for one group label.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSummary {
    pub group: String,
    pub mean: f64,
    pub count: usize,
}

/// Splits per-mesh errors by the group label in `metadata`. Rows come back
/// sorted by label.
pub fn group_errors(errors: &BTreeMap<String, f64>, metadata: &BTreeMap<String, String>) -> Result<Vec<GroupSummary>> {
    let mut sums: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for (id, err) in errors {
        let label = metadata.get(id).ok_or_else(|| Error::MissingMetadata(id.clone()))?;
        let slot = sums.entry(label).or_default();
        slot.0 += err;
        slot.1 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(group, (sum, count))| GroupSummary {
            group: group.to_string(),
            mean: sum / count as f64,
            count,
        })
        .collect())
}
