use std::sync::Mutex;

use chrono::{DateTime, NaiveDate, Utc};

/// Source of audit timestamps. Scheduling never consults it; every
/// scheduling operation takes an explicit reference date.
pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;

    fn today(&self) -> NaiveDate {
        self.now().date_naive()
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// A clock that only moves when told to. Used by the simulator and tests.
#[derive(Debug)]
pub struct ManualClock(Mutex<DateTime<Utc>>);

impl ManualClock {
    pub fn at_date(date: NaiveDate) -> Self {
        Self(Mutex::new(midnight(date)))
    }

    pub fn set_date(&self, date: NaiveDate) {
        *self.0.lock().expect("clock lock") = midnight(date);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> DateTime<Utc> {
        *self.0.lock().expect("clock lock")
    }
}

fn midnight(date: NaiveDate) -> DateTime<Utc> {
    date.and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
}
