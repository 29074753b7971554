//! CSV reports: comma-separated, LF line endings, reals with six decimals.

use std::fs;
use std::path::Path;

use super::eval::{Confusion, Metrics};
use crate::error::Result;
use crate::nn::EpochRecord;

pub fn accuracy_csv(m: &Metrics) -> String {
    let mut s = String::from("snr_db,accuracy,n\n");
    for (snr, c) in &m.per_snr {
        s.push_str(&format!("{snr},{:.6},{}\n", c.accuracy(), c.total()));
    }
    s
}

/// `K x K` grid with class names labeling the rows (true class) and the
/// columns (predicted class).
pub fn confusion_csv(class_names: &[String], c: &Confusion) -> String {
    let mut s = String::from("true\\predicted");
    for n in class_names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for (name, row) in class_names.iter().zip(&c.counts) {
        s.push_str(name);
        for v in row {
            s.push_str(&format!(",{v}"));
        }
        s.push('\n');
    }
    s
}

pub fn confusion_file_name(snr_db: i32) -> String {
    format!("confusion_{snr_db}.csv")
}

pub fn history_csv(history: &[EpochRecord]) -> String {
    let mut s = String::from("epoch,train_loss,train_acc,lr\n");
    for r in history {
        s.push_str(&format!(
            "{},{:.6},{:.6},{:.6}\n",
            r.epoch, r.train_loss, r.train_acc, r.lr
        ));
    }
    s
}

pub fn write_history(dir: &Path, history: &[EpochRecord]) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("history.csv"), history_csv(history))?;
    Ok(())
}

/// Writes `accuracy_vs_snr.csv` and one `confusion_<snr>.csv` per SNR.
pub fn write_reports(dir: &Path, m: &Metrics) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("accuracy_vs_snr.csv"), accuracy_csv(m))?;
    for (snr, c) in &m.per_snr {
        fs::write(
            dir.join(confusion_file_name(*snr)),
            confusion_csv(&m.class_names, c),
        )?;
    }
    Ok(())
}
