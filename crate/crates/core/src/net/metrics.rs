//! Classification metrics. Scores are percentages in `[0, 100]`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub macro_f1: f64,
    pub accuracy: f64,
    pub per_class: Vec<ClassScores>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub loss: Option<f64>,
}

impl Metrics {
    /// Scores `(truth, prediction)` pairs over `classes` classes.
    ///
    /// The macro average runs over classes that occur in the truth or the
    /// predictions; a class with no true and no predicted samples does not
    /// count. An undefined precision or recall counts as zero.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>, classes: usize) -> Self {
        let mut confusion = vec![vec![0usize; classes]; classes];
        let mut total = 0;
        for (t, p) in pairs {
            confusion[t][p] += 1;
            total += 1;
        }
        let mut per_class = Vec::with_capacity(classes);
        let mut f1_sum = 0.0;
        let mut counted = 0;
        let mut correct = 0;
        for k in 0..classes {
            let tp = confusion[k][k];
            correct += tp;
            let support: usize = confusion[k].iter().sum();
            let predicted: usize = confusion.iter().map(|row| row[k]).sum();
            let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
            if support > 0 || predicted > 0 {
                f1_sum += f1;
                counted += 1;
            }
            per_class.push(ClassScores {
                precision: 100.0 * precision,
                recall: 100.0 * recall,
                f1: 100.0 * f1,
                support,
            });
        }
        Self {
            macro_f1: if counted == 0 { 0.0 } else { 100.0 * f1_sum / counted as f64 },
            accuracy: if total == 0 { 0.0 } else { 100.0 * correct as f64 / total as f64 },
            per_class,
            confusion,
            loss: None,
        }
    }

    /// Confusion matrix as CSV, one row per true class.
    pub fn confusion_csv(&self, class_names: &[String]) -> String {
        let mut out = String::from("true\\predicted");
        for name in class_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (k, row) in self.confusion.iter().enumerate() {
            out.push_str(class_names.get(k).map_or("?", String::as_str));
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Macro F1 (percent) of predictions against truth.
pub fn macro_f1(truth: &[usize], predicted: &[usize], classes: usize) -> f64 {
    Metrics::from_pairs(truth.iter().copied().zip(predicted.iter().copied()), classes).macro_f1
}
