use crate::error::{Error, Result};
use crate::guidance::{flow_from_polar, VelocityLaw};
use crate::kgfield::{eval_field, polar, WaveState};
use crate::num::{lit, Real};

use super::{
    detect_self_intersection, EventKind, InitialCondition, IntegratorConfig, Sample, StopReason,
    TrajectoryEvent, TrajectoryRecord,
};

/// State of the flow at a point: tangent plus the sign of `S⁰`.
#[derive(Clone, Copy)]
struct Probe<T> {
    dt: T,
    dx: T,
    s0: T,
}

struct Flow<'a, T> {
    state: &'a WaveState<T>,
    law: VelocityLaw,
    eps_node: T,
}

impl<T: Real> Flow<'_, T> {
    fn probe(&self, t: T, x: T) -> std::result::Result<Probe<T>, (EventKind, Error)> {
        let f = eval_field(self.state, x, t).map_err(|e| (EventKind::BoundaryHit, e))?;
        let p = polar(&f, self.eps_node);
        if p.near_node {
            return Err((EventKind::NodeProximity, p.regular().unwrap_err()));
        }
        let v = flow_from_polar(&p, self.law, self.state.rest_mass())
            .map_err(|e| (EventKind::DegenerateFlow, e))?;
        if !(v.dtau_t.is_finite() && v.dtau_x.is_finite()) {
            return Err((
                EventKind::DegenerateFlow,
                Error::NoTimelikeFlow("non-finite flow".into()),
            ));
        }
        Ok(Probe {
            dt: v.dtau_t,
            dx: v.dtau_x,
            s0: p.s_cov[0],
        })
    }

    /// One classical RK4 step of size `h` from `(t, x)` with known tangent `k1`.
    fn rk4(
        &self,
        t: T,
        x: T,
        k1: Probe<T>,
        h: T,
    ) -> std::result::Result<(T, T), (EventKind, Error)> {
        let half = h / lit(2.0);
        let k2 = self.probe(t + half * k1.dt, x + half * k1.dx)?;
        let k3 = self.probe(t + half * k2.dt, x + half * k2.dx)?;
        let k4 = self.probe(t + h * k3.dt, x + h * k3.dx)?;
        let sixth = h / lit(6.0);
        let two = lit::<T>(2.0);
        Ok((
            t + sixth * (k1.dt + two * k2.dt + two * k3.dt + k4.dt),
            x + sixth * (k1.dx + two * k2.dx + two * k3.dx + k4.dx),
        ))
    }
}

fn stop_for(kind: EventKind) -> StopReason {
    match kind {
        EventKind::NodeProximity => StopReason::NodeProximity,
        EventKind::BoundaryHit => StopReason::BoundaryHit,
        _ => StopReason::DegenerateFlow,
    }
}

/// Integrates one flow line of `law` from `ic`.
///
/// The step count is `round(tau_span / step)` capped by `max_steps`, so all
/// samples are exactly one step apart. Integration halts at the first node,
/// wall or degenerate point; sign changes of `S⁰` are located by bisection on
/// the RK4 sub-step and recorded without stopping. Self-intersections of the
/// finished polyline are appended at the end.
pub fn integrate<T: Real>(
    state: &WaveState<T>,
    law: VelocityLaw,
    ic: InitialCondition<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<TrajectoryRecord<T>> {
    cfg.validate()?;
    let length = state.length();
    if !(ic.x0 > T::zero() && ic.x0 < length) || !ic.t0.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "initial position {} must lie strictly inside (0, {})",
            ic.x0, length
        )));
    }
    let flow = Flow {
        state,
        law,
        eps_node: cfg.eps_node,
    };
    let h = cfg.step;
    let mut current = flow
        .probe(ic.t0, ic.x0)
        .map_err(|(_, e)| Error::DegenerateStart {
            x: ic.x0.to_f64().unwrap_or(f64::NAN),
            t: ic.t0.to_f64().unwrap_or(f64::NAN),
            reason: e.to_string(),
        })?;

    let n_steps = (cfg.tau_span / h).round().to_usize().unwrap_or(usize::MAX);
    let budget = n_steps.min(cfg.max_steps);
    let mut samples = Vec::with_capacity(budget + 1);
    let mut events = Vec::new();
    let (mut t, mut x) = (ic.t0, ic.x0);
    samples.push(Sample {
        tau: T::zero(),
        x,
        t,
        dtau_t: current.dt,
        dtau_x: current.dx,
    });
    let mut stop = if n_steps > cfg.max_steps {
        StopReason::StepBudget
    } else {
        StopReason::TauSpan
    };

    for k in 0..budget {
        let tau = h * T::count(k);
        let stepped = flow.rk4(t, x, current, h).and_then(|(tn, xn)| {
            if xn <= T::zero() || xn >= length {
                let err = Error::OutsideBox {
                    x: xn.to_f64().unwrap_or(f64::NAN),
                    length: length.to_f64().unwrap_or(f64::NAN),
                };
                return Err((EventKind::BoundaryHit, err));
            }
            flow.probe(tn, xn).map(|p| (tn, xn, p))
        });
        let (tn, xn, next) = match stepped {
            Ok(v) => v,
            Err((kind, _)) => {
                events.push(TrajectoryEvent { kind, tau, x, t });
                stop = stop_for(kind);
                break;
            }
        };
        if (next.s0 < T::zero()) != (current.s0 < T::zero()) {
            events.push(locate_s0_change(&flow, t, x, current, h, tau));
        }
        t = tn;
        x = xn;
        current = next;
        samples.push(Sample {
            tau: h * T::count(k + 1),
            x,
            t,
            dtau_t: current.dt,
            dtau_x: current.dx,
        });
    }

    let mut record = TrajectoryRecord {
        law,
        samples,
        events,
        stop,
    };
    let loops = detect_self_intersection(&record, cfg.eps_event);
    record.events.extend(loops);
    record.events.sort_by(|a, b| {
        a.tau
            .partial_cmp(&b.tau)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(record)
}

/// Bisects the RK4 sub-step `s ∈ (0, h)` at which `S⁰` changes sign.
fn locate_s0_change<T: Real>(
    flow: &Flow<'_, T>,
    t: T,
    x: T,
    k1: Probe<T>,
    h: T,
    tau: T,
) -> TrajectoryEvent<T> {
    let start_neg = k1.s0 < T::zero();
    let (mut lo, mut hi) = (T::zero(), h);
    let mut at = (t, x);
    for _ in 0..80 {
        let mid = (lo + hi) / lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        match flow
            .rk4(t, x, k1, mid)
            .and_then(|(tm, xm)| flow.probe(tm, xm).map(|p| (tm, xm, p)))
        {
            Ok((tm, xm, p)) => {
                if (p.s0 < T::zero()) == start_neg {
                    lo = mid;
                } else {
                    hi = mid;
                    at = (tm, xm);
                }
            }
            Err(_) => hi = mid,
        }
    }
    TrajectoryEvent {
        kind: EventKind::S0SignChange,
        tau: tau + hi,
        x: at.1,
        t: at.0,
    }
}
