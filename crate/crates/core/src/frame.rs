//! The validated input to every audit: aligned label and group vectors.

use std::fmt;

use crate::error::{Error, Result};

/// Named column of an [`AuditFrame`], used in validation errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Predicted,
    Corrected,
    Group,
    True,
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Column::Predicted => "y_predicted",
            Column::Corrected => "y_corrected",
            Column::Group => "group",
            Column::True => "y_true",
        })
    }
}

/// Protected-group membership. `S = 1` is privileged, `S = 0` unprivileged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Unprivileged,
    Privileged,
}

impl Group {
    pub fn id(self) -> u8 {
        match self {
            Group::Unprivileged => 0,
            Group::Privileged => 1,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Group::Unprivileged),
            1 => Some(Group::Privileged),
            _ => None,
        }
    }
}

/// Aligned binary vectors: predicted labels, corrected labels, group
/// membership and optionally the true labels. `1` is the favorable outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditFrame {
    y_predicted: Vec<u8>,
    y_corrected: Vec<u8>,
    group: Vec<u8>,
    y_true: Option<Vec<u8>>,
}

fn check_binary(column: Column, values: &[u8]) -> Result<()> {
    match values.iter().position(|&v| v > 1) {
        Some(index) => Err(Error::NonBinary {
            column,
            index,
            value: i64::from(values[index]),
        }),
        None => Ok(()),
    }
}

fn check_len(column: Column, values: &[u8], expected: usize) -> Result<()> {
    if values.len() != expected {
        return Err(Error::LengthMismatch {
            column,
            expected,
            found: values.len(),
        });
    }
    Ok(())
}

impl AuditFrame {
    pub fn new(y_predicted: Vec<u8>, y_corrected: Vec<u8>, group: Vec<u8>, y_true: Option<Vec<u8>>) -> Result<Self> {
        let n = y_predicted.len();
        if n == 0 {
            return Err(Error::EmptyFrame);
        }
        check_len(Column::Corrected, &y_corrected, n)?;
        check_len(Column::Group, &group, n)?;
        if let Some(t) = &y_true {
            check_len(Column::True, t, n)?;
        }
        check_binary(Column::Predicted, &y_predicted)?;
        check_binary(Column::Corrected, &y_corrected)?;
        check_binary(Column::Group, &group)?;
        if let Some(t) = &y_true {
            check_binary(Column::True, t)?;
        }
        Ok(Self {
            y_predicted,
            y_corrected,
            group,
            y_true,
        })
    }

    /// Frame where nothing has been corrected yet (`y_corrected = y_predicted`).
    pub fn from_predictions(y_predicted: Vec<u8>, group: Vec<u8>, y_true: Option<Vec<u8>>) -> Result<Self> {
        let corrected = y_predicted.clone();
        Self::new(y_predicted, corrected, group, y_true)
    }

    /// Same predictions, groups and true labels with new corrected labels.
    pub fn with_corrected(&self, y_corrected: Vec<u8>) -> Result<Self> {
        Self::new(
            self.y_predicted.clone(),
            y_corrected,
            self.group.clone(),
            self.y_true.clone(),
        )
    }

    pub fn len(&self) -> usize {
        self.y_predicted.len()
    }

    /// Always false for a constructed frame.
    pub fn is_empty(&self) -> bool {
        self.y_predicted.is_empty()
    }

    pub fn y_predicted(&self) -> &[u8] {
        &self.y_predicted
    }

    pub fn y_corrected(&self) -> &[u8] {
        &self.y_corrected
    }

    pub fn group(&self) -> &[u8] {
        &self.group
    }

    pub fn y_true(&self) -> Option<&[u8]> {
        self.y_true.as_deref()
    }

    /// Selector for the instances of one group.
    pub fn group_mask(&self, g: Group) -> Vec<bool> {
        let id = g.id();
        self.group.iter().map(|&s| s == id).collect()
    }

    pub fn group_size(&self, g: Group) -> usize {
        let id = g.id();
        self.group.iter().filter(|&&s| s == id).count()
    }

    /// Exchanges the roles of predicted and corrected labels.
    pub fn swapped_labels(&self) -> Self {
        Self {
            y_predicted: self.y_corrected.clone(),
            y_corrected: self.y_predicted.clone(),
            group: self.group.clone(),
            y_true: self.y_true.clone(),
        }
    }

    /// Relabels privileged as unprivileged and vice versa.
    pub fn swapped_groups(&self) -> Self {
        Self {
            y_predicted: self.y_predicted.clone(),
            y_corrected: self.y_corrected.clone(),
            group: self.group.iter().map(|&s| 1 - s).collect(),
            y_true: self.y_true.clone(),
        }
    }
}
