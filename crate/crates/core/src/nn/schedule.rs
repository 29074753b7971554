/// Halves the learning rate once the best training accuracy has gone
/// `patience` consecutive epochs without strictly improving.
#[derive(Clone, Debug, PartialEq)]
pub struct PlateauSchedule {
    pub patience: usize,
    pub factor: f64,
    best: Option<f64>,
    stale: usize,
}

impl PlateauSchedule {
    pub fn new(patience: usize) -> Self {
        PlateauSchedule {
            patience,
            factor: 0.5,
            best: None,
            stale: 0,
        }
    }

    /// Records one epoch's accuracy; true when the rate should be cut now.
    pub fn observe(&mut self, accuracy: f64) -> bool {
        match self.best {
            Some(b) if accuracy <= b => {
                self.stale += 1;
                if self.stale >= self.patience {
                    self.stale = 0;
                    return true;
                }
            }
            _ => {
                self.best = Some(accuracy);
                self.stale = 0;
            }
        }
        false
    }

    pub fn next_lr(&mut self, accuracy: f64, lr: f64) -> f64 {
        if self.observe(accuracy) {
            lr * self.factor
        } else {
            lr
        }
    }
}

/// Learning rate after the last epoch of `history`, given the rate in use
/// during it. Replays the whole history, so it is a pure function.
pub fn lr_schedule(history: &[f64], current_lr: f64, patience: usize) -> f64 {
    let mut sched = PlateauSchedule::new(patience);
    let mut cut = false;
    for &acc in history {
        cut = sched.observe(acc);
    }
    if cut {
        current_lr * sched.factor
    } else {
        current_lr
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_improvement_keeps_rate() {
        assert_eq!(lr_schedule(&[50.0, 51.0, 52.0], 0.001, 3), 0.001);
    }

    #[test]
    fn third_stale_epoch_halves() {
        assert_eq!(lr_schedule(&[52.0, 51.9, 51.8], 0.001, 3), 0.001);
        assert_eq!(lr_schedule(&[52.0, 51.9, 51.8, 51.7], 0.001, 3), 0.0005);
    }

    #[test]
    fn counter_resets_after_halving() {
        let mut s = PlateauSchedule::new(3);
        let mut lr = 0.001;
        let mut rates = vec![];
        for acc in [52.0, 51.9, 51.8, 51.7, 51.6, 51.5, 51.4] {
            lr = s.next_lr(acc, lr);
            rates.push(lr);
        }
        assert_eq!(
            rates,
            vec![0.001, 0.001, 0.001, 0.0005, 0.0005, 0.0005, 0.00025]
        );
    }

    #[test]
    fn ties_do_not_count_as_improvement() {
        assert_eq!(lr_schedule(&[50.0, 50.0, 50.0, 50.0], 0.002, 3), 0.001);
    }

    #[test]
    fn improvement_resets_counter() {
        let mut s = PlateauSchedule::new(3);
        let cuts: Vec<bool> = [50.0, 49.0, 49.0, 51.0, 50.0, 50.0, 50.0]
            .iter()
            .map(|&a| s.observe(a))
            .collect();
        assert_eq!(cuts, vec![false, false, false, false, false, false, true]);
    }
}
