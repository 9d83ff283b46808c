use core::fmt;

/// Why a frame failed, or that it did not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Overlapped an LTE ON period.
    LteEdge,
    /// Another station picked the same slot.
    WifiCollision,
}

/// One simulator event. Times are nanoseconds from the start of the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    LteOn {
        t_ns: u64,
        until_ns: u64,
    },
    Backoff {
        t_ns: u64,
        station: usize,
        stage: u32,
        slots: u32,
    },
    TxStart {
        t_ns: u64,
        station: usize,
        stage: u32,
        end_ns: u64,
    },
    TxEnd {
        t_ns: u64,
        station: usize,
        outcome: Outcome,
    },
    Drop {
        t_ns: u64,
        station: usize,
    },
}

impl TraceEvent {
    pub fn time_ns(&self) -> u64 {
        match *self {
            TraceEvent::LteOn { t_ns, .. }
            | TraceEvent::Backoff { t_ns, .. }
            | TraceEvent::TxStart { t_ns, .. }
            | TraceEvent::TxEnd { t_ns, .. }
            | TraceEvent::Drop { t_ns, .. } => t_ns,
        }
    }
}

/// `t_ns event station detail`, with `-` for events without a station.
impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TraceEvent::LteOn { t_ns, until_ns } => write!(f, "{t_ns} lte_on - until={until_ns}"),
            TraceEvent::Backoff {
                t_ns,
                station,
                stage,
                slots,
            } => write!(f, "{t_ns} backoff {station} stage={stage} slots={slots}"),
            TraceEvent::TxStart {
                t_ns,
                station,
                stage,
                end_ns,
            } => write!(f, "{t_ns} tx_start {station} stage={stage} end={end_ns}"),
            TraceEvent::TxEnd { t_ns, station, outcome } => {
                let o = match outcome {
                    Outcome::Success => "success",
                    Outcome::LteEdge => "lte_edge",
                    Outcome::WifiCollision => "wifi_collision",
                };
                write!(f, "{t_ns} tx_end {station} {o}")
            }
            TraceEvent::Drop { t_ns, station } => write!(f, "{t_ns} drop {station} retry_limit"),
        }
    }
}
