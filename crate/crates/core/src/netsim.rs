//! Lock-step executor for the synchronous `p`-port model.
//!
//! Every round the engine collects all emitted messages, validates them
//! against the port limits, meters them, and then hands each processor its
//! inbox. Local computation between rounds is free; a round in which no
//! processor sends anything is not counted.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Fe, PrimeField};

#[derive(Debug, Clone)]
pub struct SystemConfig {
    pub k: usize,
    pub p: usize,
    pub field: PrimeField,
    pub beta_startup: f64,
    pub tau_per_element: f64,
    pub round_limit: usize,
    pub record_trace: bool,
    /// Record violations in the report and keep going instead of aborting.
    pub lenient: bool,
}

impl SystemConfig {
    pub fn new(k: usize, p: usize, field: &PrimeField) -> Result<Self> {
        if k == 0 {
            return Err(Error::BadConfig("K must be at least 1".into()));
        }
        if k > 1 && (p == 0 || p >= k) {
            return Err(Error::BadConfig(format!("need 1 <= p < K, got p = {p}, K = {k}")));
        }
        Ok(Self {
            k,
            p,
            field: field.clone(),
            beta_startup: 1.0,
            tau_per_element: 1.0,
            round_limit: default_round_limit(k),
            record_trace: false,
            lenient: false,
        })
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn with_round_limit(mut self, limit: usize) -> Self {
        self.round_limit = limit;
        self
    }

    pub fn with_costs(mut self, beta_startup: f64, tau_per_element: f64) -> Self {
        self.beta_startup = beta_startup;
        self.tau_per_element = tau_per_element;
        self
    }

    pub fn lenient(mut self, on: bool) -> Self {
        self.lenient = on;
        self
    }

    /// Same engine settings for a system of a different size.
    pub fn resized(&self, k: usize) -> Result<Self> {
        let mut c = Self::new(k, self.p, &self.field)?;
        c.beta_startup = self.beta_startup;
        c.tau_per_element = self.tau_per_element;
        c.record_trace = self.record_trace;
        c.lenient = self.lenient;
        c.round_limit = self.round_limit.max(default_round_limit(k));
        Ok(c)
    }
}

/// `4 * ceil(log2 K) + 8`.
pub fn default_round_limit(k: usize) -> usize {
    let mut log2 = 0;
    while (1usize << log2) < k {
        log2 += 1;
    }
    4 * log2 + 8
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outgoing {
    pub to: usize,
    /// Port index in `1..=p`.
    pub port: usize,
    pub payload: Vec<Fe>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub sender: usize,
    pub receiver: usize,
    pub port: usize,
    pub round: usize,
    pub payload: Vec<Fe>,
}

/// A per-processor state machine driven by [`run`].
///
/// Implementations must be deterministic functions of their state; the
/// engine relies on that for reproducible traces.
pub trait Protocol {
    type State;

    fn init(&self, k: usize, x: Fe) -> Self::State;
    /// Messages processor `state` sends in `round` (1-based).
    fn emit(&self, state: &Self::State, round: usize) -> Vec<Outgoing>;
    /// Applies the inbox of `round`, sorted by `(sender, port)`.
    fn absorb(&self, state: &mut Self::State, round: usize, inbound: &[Message]);
    /// Whether the processor has nothing left to do after `round` rounds.
    fn is_done(&self, state: &Self::State, round: usize) -> bool;
    fn finish(&self, state: Self::State) -> Fe;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Send,
    Receive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    PortOverflow {
        processor: usize,
        round: usize,
        direction: Direction,
        count: usize,
    },
    PortReuse {
        processor: usize,
        port: usize,
        round: usize,
    },
    BadPort {
        processor: usize,
        port: usize,
        round: usize,
    },
    SelfMessage {
        processor: usize,
        round: usize,
    },
    UnknownProcessor {
        sender: usize,
        receiver: usize,
        round: usize,
    },
    EmptyPayload {
        processor: usize,
        round: usize,
    },
    ForeignElement {
        processor: usize,
        round: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PortOverflow {
                processor,
                round,
                direction,
                count,
            } => {
                let verb = match direction {
                    Direction::Send => "sent",
                    Direction::Receive => "received",
                };
                write!(f, "PortOverflow: processor {processor} {verb} {count} messages in round {round}")
            }
            Violation::PortReuse {
                processor,
                port,
                round,
            } => write!(f, "PortReuse: processor {processor} used port {port} twice in round {round}"),
            Violation::BadPort {
                processor,
                port,
                round,
            } => write!(f, "BadPort: processor {processor} used port {port} in round {round}"),
            Violation::SelfMessage { processor, round } => {
                write!(f, "SelfMessage: processor {processor} addressed itself in round {round}")
            }
            Violation::UnknownProcessor {
                sender,
                receiver,
                round,
            } => write!(f, "UnknownProcessor: {sender} sent to {receiver} in round {round}"),
            Violation::EmptyPayload { processor, round } => {
                write!(f, "EmptyPayload: processor {processor} sent an empty message in round {round}")
            }
            Violation::ForeignElement { processor, round } => write!(
                f,
                "ForeignElement: processor {processor} sent an element of another field in round {round}"
            ),
        }
    }
}

/// One delivered message. Field order is the JSON-lines key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub round: usize,
    pub from: usize,
    pub to: usize,
    pub port: usize,
    pub len: usize,
    pub payload: Vec<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CostReport {
    pub c1: usize,
    pub c2: usize,
    /// Largest message size of each counted round.
    pub d: Vec<usize>,
    #[serde(skip)]
    pub trace: Option<Vec<TraceEntry>>,
    pub violations: Vec<Violation>,
}

impl CostReport {
    pub fn empty(traced: bool) -> Self {
        Self {
            trace: traced.then(Vec::new),
            ..Self::default()
        }
    }

    /// Sequential composition: `other`'s rounds run after `self`'s.
    pub fn then(mut self, other: CostReport) -> Self {
        let offset = self.c1;
        self.c1 += other.c1;
        self.c2 += other.c2;
        self.d.extend(other.d);
        self.violations.extend(other.violations);
        self.trace = match (self.trace, other.trace) {
            (Some(mut a), Some(b)) => {
                a.extend(b.into_iter().map(|mut e| {
                    e.round += offset;
                    e
                }));
                Some(a)
            }
            _ => None,
        };
        self
    }

    pub fn total_cost(&self, beta: f64, tau: f64) -> f64 {
        total_cost(self, beta, tau)
    }
}

/// `C1 * beta + C2 * tau`.
pub fn total_cost(report: &CostReport, beta: f64, tau: f64) -> f64 {
    report.c1 as f64 * beta + report.c2 as f64 * tau
}

pub fn dump_trace(report: &CostReport) -> Result<&[TraceEntry]> {
    report.trace.as_deref().ok_or(Error::NoTrace)
}

/// One JSON object per line, keys `round, from, to, port, len, payload`.
pub fn trace_to_jsonl(entries: &[TraceEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&serde_json::to_string(e).expect("trace entries serialize"));
        out.push('\n');
    }
    out
}

fn validate(config: &SystemConfig, msgs: &[Message], round: usize) -> Vec<Violation> {
    let k = config.k;
    let mut out = Vec::new();
    let mut sends = vec![0usize; k];
    let mut receives = vec![0usize; k];
    for m in msgs {
        if m.receiver >= k {
            out.push(Violation::UnknownProcessor {
                sender: m.sender,
                receiver: m.receiver,
                round,
            });
            continue;
        }
        if m.receiver == m.sender {
            out.push(Violation::SelfMessage {
                processor: m.sender,
                round,
            });
        }
        if m.port == 0 || m.port > config.p {
            out.push(Violation::BadPort {
                processor: m.sender,
                port: m.port,
                round,
            });
        }
        if m.payload.is_empty() {
            out.push(Violation::EmptyPayload {
                processor: m.sender,
                round,
            });
        }
        if m.payload.iter().any(|v| !config.field.contains(*v)) {
            out.push(Violation::ForeignElement {
                processor: m.sender,
                round,
            });
        }
        sends[m.sender] += 1;
        receives[m.receiver] += 1;
    }
    for (processor, &count) in sends.iter().enumerate() {
        if count > config.p {
            out.push(Violation::PortOverflow {
                processor,
                round,
                direction: Direction::Send,
                count,
            });
        }
    }
    for (processor, &count) in receives.iter().enumerate() {
        if count > config.p {
            out.push(Violation::PortOverflow {
                processor,
                round,
                direction: Direction::Receive,
                count,
            });
        }
    }
    // msgs are sorted by (sender, port)
    for w in msgs.windows(2) {
        if w[0].sender == w[1].sender && w[0].port == w[1].port {
            out.push(Violation::PortReuse {
                processor: w[0].sender,
                port: w[0].port,
                round,
            });
        }
    }
    // overflow outranks the per-message checks when picking the reported error
    out.sort_by_key(|v| match v {
        Violation::PortOverflow { .. } => 0,
        Violation::PortReuse { .. } => 1,
        _ => 2,
    });
    out
}

/// Executes `protocol` on `config.k` processors holding `inputs`.
pub fn run<P: Protocol>(
    config: &SystemConfig,
    protocol: &P,
    inputs: &[Fe],
) -> Result<(Vec<Fe>, CostReport)> {
    if inputs.len() != config.k {
        return Err(Error::DimensionError(format!(
            "{} inputs for {} processors",
            inputs.len(),
            config.k
        )));
    }
    if let Some(bad) = inputs.iter().find(|v| !config.field.contains(**v)) {
        return Err(Error::FieldMismatch {
            left: config.field.modulus(),
            right: bad.modulus(),
        });
    }
    let mut states: Vec<P::State> = inputs
        .iter()
        .enumerate()
        .map(|(k, &x)| protocol.init(k, x))
        .collect();
    let mut report = CostReport::empty(config.record_trace);
    let mut round = 0;
    loop {
        if states.iter().all(|s| protocol.is_done(s, round)) {
            break;
        }
        if round >= config.round_limit {
            return Err(Error::NonTermination {
                limit: config.round_limit,
            });
        }
        round += 1;

        let mut msgs: Vec<Message> = Vec::new();
        for (sender, s) in states.iter().enumerate() {
            msgs.extend(protocol.emit(s, round).into_iter().map(|o| Message {
                sender,
                receiver: o.to,
                port: o.port,
                round,
                payload: o.payload,
            }));
        }
        msgs.sort_by_key(|m| (m.sender, m.port));

        let violations = validate(config, &msgs, round);
        if let Some(first) = violations.first() {
            if !config.lenient {
                return Err(Error::Violation(first.clone()));
            }
            report.violations.extend(violations);
            msgs.retain(|m| m.receiver < config.k);
        }

        if !msgs.is_empty() {
            report.c1 += 1;
            let dt = msgs.iter().map(|m| m.payload.len()).max().unwrap_or(0);
            report.d.push(dt);
            report.c2 += dt;
            if let Some(trace) = report.trace.as_mut() {
                trace.extend(msgs.iter().map(|m| TraceEntry {
                    round: report.c1,
                    from: m.sender,
                    to: m.receiver,
                    port: m.port,
                    len: m.payload.len(),
                    payload: m.payload.iter().map(|v| v.value()).collect(),
                }));
            }
        }

        let mut inboxes: Vec<Vec<Message>> = vec![Vec::new(); config.k];
        for m in msgs {
            let r = m.receiver;
            inboxes[r].push(m);
        }
        for (s, inbox) in states.iter_mut().zip(&inboxes) {
            protocol.absorb(s, round, inbox);
        }
    }
    let outputs = states.into_iter().map(|s| protocol.finish(s)).collect();
    Ok((outputs, report))
}

/// Runs independent sub-protocols side by side on disjoint processor sets.
///
/// Each group sees virtual ids `0..members.len()`; the wrapper translates
/// them to physical ids in both directions.
pub struct Grouped<P> {
    groups: Vec<(Vec<usize>, P)>,
    locate: Vec<(usize, usize)>,
}

impl<P> Grouped<P> {
    pub fn new(k: usize, groups: Vec<(Vec<usize>, P)>) -> Result<Self> {
        let mut locate = vec![(usize::MAX, usize::MAX); k];
        for (g, (members, _)) in groups.iter().enumerate() {
            for (v, &phys) in members.iter().enumerate() {
                if phys >= k || locate[phys].0 != usize::MAX {
                    return Err(Error::BadConfig(format!(
                        "processor {phys} is out of range or in two groups"
                    )));
                }
                locate[phys] = (g, v);
            }
        }
        if locate.iter().any(|l| l.0 == usize::MAX) {
            return Err(Error::BadConfig("groups do not cover every processor".into()));
        }
        Ok(Self { groups, locate })
    }
}

pub struct GroupState<S> {
    group: usize,
    inner: S,
}

impl<P: Protocol> Protocol for Grouped<P> {
    type State = GroupState<P::State>;

    fn init(&self, k: usize, x: Fe) -> Self::State {
        let (group, v) = self.locate[k];
        GroupState {
            group,
            inner: self.groups[group].1.init(v, x),
        }
    }

    fn emit(&self, state: &Self::State, round: usize) -> Vec<Outgoing> {
        let (members, proto) = &self.groups[state.group];
        proto
            .emit(&state.inner, round)
            .into_iter()
            .map(|o| Outgoing {
                to: members[o.to],
                ..o
            })
            .collect()
    }

    fn absorb(&self, state: &mut Self::State, round: usize, inbound: &[Message]) {
        let (_, proto) = &self.groups[state.group];
        let local: Vec<Message> = inbound
            .iter()
            .map(|m| Message {
                sender: self.locate[m.sender].1,
                receiver: self.locate[m.receiver].1,
                ..m.clone()
            })
            .collect();
        proto.absorb(&mut state.inner, round, &local);
    }

    fn is_done(&self, state: &Self::State, round: usize) -> bool {
        self.groups[state.group].1.is_done(&state.inner, round)
    }

    fn finish(&self, state: Self::State) -> Fe {
        self.groups[state.group].1.finish(state.inner)
    }
}
