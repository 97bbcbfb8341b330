use alloc::string::String;
use alloc::vec::Vec;

use crate::config::PipelineConfig;
use crate::math::{smoothstep, smoothstep_rate, sqrt};
use crate::openx::{Action, Condition, OdrDocument, OscDocument};

use super::ReplayError;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceSample {
    pub time: f64,
    pub s: f64,
    pub t: f64,
    pub lane: i32,
    pub speed: f64,
}

/// Fixed-step time series per entity, in road coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub dt: f64,
    /// (entity name, samples), in declaration order.
    pub entities: Vec<(String, Vec<TraceSample>)>,
}

impl SimTrace {
    pub fn entity(&self, name: &str) -> Option<&[TraceSample]> {
        self.entities.iter().find(|(n, _)| n == name).map(|(_, s)| s.as_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayParams {
    pub dt: f64,
    /// Simulated time after the last event completes.
    pub tail: f64,
    pub timeout: f64,
}

impl From<&PipelineConfig> for ReplayParams {
    fn from(cfg: &PipelineConfig) -> Self {
        Self {
            dt: cfg.dt,
            tail: cfg.replay_tail,
            timeout: cfg.replay_timeout,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Ramp {
    from: f64,
    to: f64,
    start: f64,
    duration: f64,
}

impl Ramp {
    fn value(&self, time: f64) -> f64 {
        if self.duration <= 0.0 || time >= self.start + self.duration {
            return self.to;
        }
        let u = ((time - self.start) / self.duration).max(0.0);
        self.from + (self.to - self.from) * u
    }

    fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, Copy)]
struct Shift {
    from: f64,
    to: f64,
    start: f64,
    duration: f64,
    target: i32,
}

impl Shift {
    fn u(&self, time: f64) -> f64 {
        ((time - self.start) / self.duration).clamp(0.0, 1.0)
    }

    fn offset(&self, time: f64) -> f64 {
        self.from + (self.to - self.from) * smoothstep(self.u(time))
    }

    fn rate(&self, time: f64) -> f64 {
        let u = (time - self.start) / self.duration;
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        (self.to - self.from) * smoothstep_rate(u) / self.duration
    }

    fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, Copy)]
struct Actor {
    time: f64,
    s: f64,
    traveled: f64,
    /// Lateral offset when no lane change is active.
    t_hold: f64,
    lane: i32,
    speed: Ramp,
    shift: Option<Shift>,
}

impl Actor {
    fn speed(&self) -> f64 {
        self.speed.value(self.time)
    }

    fn t(&self) -> f64 {
        self.shift.map_or(self.t_hold, |sh| sh.offset(self.time))
    }

    fn s_rate(&self, odr: &OdrDocument, time: f64, s: f64) -> f64 {
        let v = self.speed.value(time);
        let (t, t_dot) = match self.shift {
            Some(sh) => (sh.offset(time), sh.rate(time)),
            None => (self.t_hold, 0.0),
        };
        let along = sqrt((v * v - t_dot * t_dot).max(0.0));
        along / (1.0 - odr.road.curvature_at(s) * t)
    }

    /// State after `h` seconds: speed and offset are exact, traveled distance is
    /// exact for the piecewise-linear speed, s uses the trapezoidal rule.
    fn advance(&self, odr: &OdrDocument, h: f64) -> Actor {
        let mut next = *self;
        let t1 = self.time + h;
        let mut traveled = 0.0;
        let mut a = self.time;
        let kink = self.speed.end();
        for b in [kink, t1] {
            if b > a && b <= t1 {
                traveled += 0.5 * (self.speed.value(a) + self.speed.value(b)) * (b - a);
                a = b;
            }
        }
        next.traveled += traveled;
        let r0 = self.s_rate(odr, self.time, self.s);
        let predictor = self.s + h * r0;
        let r1 = self.s_rate(odr, t1, predictor);
        next.s = self.s + 0.5 * h * (r0 + r1);
        next.time = t1;
        if let Some(sh) = self.shift {
            if t1 >= sh.end() {
                next.shift = None;
                next.t_hold = sh.to;
                next.lane = sh.target;
            }
        }
        next
    }

}

struct PendingEvent<'a> {
    actor: usize,
    name: &'a str,
    condition: &'a Condition,
    action: &'a Action,
}

fn condition_value(c: &Condition, actors: &[Actor], names: &[&str]) -> (f64, f64, bool) {
    let find = |n: &str| names.iter().position(|x| *x == n).unwrap_or(0);
    match c {
        Condition::TraveledDistance { entity, value } => {
            let a = &actors[find(entity)];
            (a.traveled, *value, true)
        }
        Condition::RelativeDistance { entity, reference, value, rule } => {
            let gap = actors[find(entity)].s - actors[find(reference)].s;
            (gap, *value, matches!(rule, crate::scenario_detect::TriggerRule::GreaterThan))
        }
    }
}

fn holds(c: &Condition, actors: &[Actor], names: &[&str]) -> bool {
    let (v, threshold, rising) = condition_value(c, actors, names);
    match c {
        Condition::TraveledDistance { .. } => v >= threshold,
        Condition::RelativeDistance { .. } => {
            if rising {
                v > threshold
            } else {
                v < threshold
            }
        }
    }
}

/// Runs the scenario at fixed step `dt`.
///
/// Conditions are evaluated continuously: when one becomes true inside a step
/// the step is split at the triggering instant (found by bisection) and the
/// action starts there. Speed actions ramp linearly, lane changes follow a
/// cubic ease between lane centres. The run ends `tail` seconds after every
/// event has fired and finished.
pub fn interpret(osc: &OscDocument, odr: &OdrDocument, p: &ReplayParams) -> Result<SimTrace, ReplayError> {
    if !(p.dt > 0.0) {
        return Err(ReplayError::BadStep(p.dt));
    }
    let names: Vec<&str> = osc.entities.iter().map(|e| e.name.as_str()).collect();
    let mut actors = Vec::with_capacity(names.len());
    for name in &names {
        let init = osc
            .init
            .iter()
            .find(|i| i.entity == *name)
            .ok_or_else(|| ReplayError::NoInit(String::from(*name)))?;
        let t_hold = odr
            .road
            .lane_center(init.s, init.lane_id)
            .ok_or(ReplayError::UnknownLane { lane: init.lane_id, s: init.s })?;
        actors.push(Actor {
            time: 0.0,
            s: init.s,
            traveled: 0.0,
            t_hold,
            lane: init.lane_id,
            speed: Ramp { from: init.speed, to: init.speed, start: 0.0, duration: 0.0 },
            shift: None,
        });
    }

    let mut pending: Vec<PendingEvent> = osc
        .maneuver_groups
        .iter()
        .flat_map(|g| {
            let actor = names.iter().position(|n| *n == g.actor).unwrap_or(0);
            g.events.iter().map(move |e| PendingEvent {
                actor,
                name: e.name.as_str(),
                condition: &e.condition,
                action: &e.action,
            })
        })
        .collect();

    let record = |actors: &[Actor], traces: &mut Vec<Vec<TraceSample>>, time: f64| {
        for (a, trace) in actors.iter().zip(traces.iter_mut()) {
            let t = a.t();
            trace.push(TraceSample {
                time,
                s: a.s,
                t,
                lane: odr.road.lane_at(a.s, t).unwrap_or(a.lane),
                speed: a.speed(),
            });
        }
    };

    let mut traces: Vec<Vec<TraceSample>> = names.iter().map(|_| Vec::new()).collect();
    // completion time of the latest-ending action started so far
    let mut done = 0.0f64;
    let fire = |actors: &mut [Actor], pending: &mut Vec<PendingEvent>, done: &mut f64| -> Result<(), ReplayError> {
        let mut k = 0;
        while k < pending.len() {
            if holds(pending[k].condition, actors, &names) {
                let ev = pending.remove(k);
                let a = &mut actors[ev.actor];
                match *ev.action {
                    Action::AbsoluteSpeed { speed, duration } => {
                        a.speed = Ramp { from: a.speed(), to: speed, start: a.time, duration };
                        *done = done.max(a.speed.end());
                    }
                    Action::LaneChange { target_lane, duration } => {
                        let to = odr
                            .road
                            .lane_center(a.s, target_lane)
                            .ok_or(ReplayError::UnknownLane { lane: target_lane, s: a.s })?;
                        let shift = Shift { from: a.t(), to, start: a.time, duration, target: target_lane };
                        *done = done.max(shift.end());
                        a.shift = Some(shift);
                    }
                }
            } else {
                k += 1;
            }
        }
        Ok(())
    };

    fire(&mut actors, &mut pending, &mut done)?;
    record(&actors, &mut traces, 0.0);
    let mut step = 0u64;
    loop {
        let t0 = step as f64 * p.dt;
        let t1 = (step + 1) as f64 * p.dt;
        let mut now = t0;
        // split the step at every triggering instant inside it
        loop {
            let h = t1 - now;
            let next: Vec<Actor> = actors.iter().map(|a| a.advance(odr, h)).collect();
            let triggered = pending.iter().any(|e| holds(e.condition, &next, &names));
            if !triggered {
                actors = next;
                break;
            }
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let probe: Vec<Actor> = actors.iter().map(|a| a.advance(odr, mid)).collect();
                if pending.iter().any(|e| holds(e.condition, &probe, &names)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            actors = actors.iter().map(|a| a.advance(odr, hi)).collect();
            now += hi;
            fire(&mut actors, &mut pending, &mut done)?;
        }
        for a in &mut actors {
            a.time = t1;
        }
        step += 1;
        record(&actors, &mut traces, t1);

        if pending.is_empty() {
            if t1 >= done + p.tail - 1e-9 {
                break;
            }
        } else if t1 >= p.timeout {
            return Err(ReplayError::Timeout {
                limit: p.timeout,
                events: pending.iter().map(|e| String::from(e.name)).collect(),
            });
        }
    }
    Ok(SimTrace {
        dt: p.dt,
        entities: names.iter().map(|n| String::from(*n)).zip(traces).collect(),
    })
}
