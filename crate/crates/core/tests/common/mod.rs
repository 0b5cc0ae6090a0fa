//! Shared test helpers: an independent per-instance recomputation of every
//! flip metric, random frame generators and property checks used by both the
//! property tests and the acceptance runner.

#![allow(dead_code)]

use flipaudit::{
    compute_proportionality, split_by_group, summarize_flips, AuditFrame, Band, Metric, MetricValue, Threshold,
    ThresholdConfig,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-12;

/// Expected value: `None` is +∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Want {
    pub value: Option<f64>,
    pub annotation: &'static str,
}

fn want(value: f64, annotation: &'static str) -> Want {
    Want {
        value: Some(value),
        annotation,
    }
}

fn inf(annotation: &'static str) -> Want {
    Want {
        value: None,
        annotation,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Counts {
    pub n: usize,
    pub flips: usize,
    pub favorable: usize,
    pub harmful: usize,
}

#[derive(Debug, Clone)]
pub struct OracleGroup {
    pub counts: Counts,
    pub fr: Want,
    pub hfp: Want,
    pub dfr: Want,
}

#[derive(Debug, Clone)]
pub struct Oracle {
    pub overall: OracleGroup,
    /// Indexed by group id.
    pub groups: [OracleGroup; 2],
    pub frd: Want,
    pub di: Want,
    pub fd: Want,
    pub rfd: Want,
    pub hfpd: Want,
    pub hdi: Want,
    pub hfd: Want,
    pub rhfd: Want,
}

fn rates(c: Counts) -> OracleGroup {
    let fr = if c.flips == 0 {
        want(0.0, "No flips")
    } else {
        want(c.flips as f64 / c.n as f64, "Regular calculation")
    };
    let hfp = if c.flips == 0 {
        want(0.0, "No flips")
    } else if c.harmful == c.flips {
        want(1.0, "Only harmful flips")
    } else if c.harmful == 0 {
        want(0.0, "No harmful flips")
    } else {
        want(c.harmful as f64 / c.flips as f64, "Regular calculation")
    };
    let dfr = match (c.favorable, c.harmful) {
        (0, 0) => want(1.0, "No flips"),
        (_, 0) => inf("Only beneficial flips"),
        (0, _) => want(0.0, "Only harmful flips"),
        (f, h) => want(f as f64 / h as f64, "Regular calculation"),
    };
    OracleGroup {
        counts: c,
        fr,
        hfp,
        dfr,
    }
}

fn family(a: f64, b: f64, overall_fr: f64) -> [Want; 4] {
    let diff = want((a - b).abs(), "Regular calculation");
    let ratio = if a == 0.0 && b == 0.0 {
        want(1.0, "Both values are zero")
    } else if a == 0.0 || b == 0.0 {
        inf("One value is zero")
    } else {
        want(a.max(b) / a.min(b), "Regular calculation")
    };
    let disparity = if a == 0.0 && b == 0.0 {
        want(1.0, "Both values are zero")
    } else if a == 0.0 || b == 0.0 {
        inf("One value is zero")
    } else {
        want((a / overall_fr - b / overall_fr).abs(), "Regular calculation")
    };
    let relative = if a + b == 0.0 {
        want(0.0, "No flips")
    } else {
        want((a - b).abs() / (a + b), "Regular calculation")
    };
    [diff, ratio, disparity, relative]
}

/// Recompute everything from the raw vectors with one pass per instance.
pub fn oracle(pred: &[u8], corr: &[u8], group: &[u8]) -> Oracle {
    let mut per = [Counts {
        n: 0,
        flips: 0,
        favorable: 0,
        harmful: 0,
    }; 3];
    for i in 0..pred.len() {
        for slot in [2, usize::from(group[i])] {
            let c = &mut per[slot];
            c.n += 1;
            if pred[i] == 0 && corr[i] == 1 {
                c.flips += 1;
                c.favorable += 1;
            } else if pred[i] == 1 && corr[i] == 0 {
                c.flips += 1;
                c.harmful += 1;
            }
        }
    }
    let overall = rates(per[2]);
    let g0 = rates(per[0]);
    let g1 = rates(per[1]);
    let ofr = overall.fr.value.unwrap();
    let [frd, di, fd, rfd] = family(g1.fr.value.unwrap(), g0.fr.value.unwrap(), ofr);
    let [hfpd, hdi, hfd, rhfd] = family(g1.hfp.value.unwrap(), g0.hfp.value.unwrap(), ofr);
    Oracle {
        overall,
        groups: [g0, g1],
        frd,
        di,
        fd,
        rfd,
        hfpd,
        hdi,
        hfd,
        rhfd,
    }
}

pub fn matches(name: &str, got: &MetricValue, want: &Want, tol: f64) -> Result<(), String> {
    let ok_value = match (got.value(), want.value) {
        (None, None) => true,
        (Some(g), Some(w)) => (g - w).abs() <= tol,
        _ => false,
    };
    if ok_value && got.annotation().as_str() == want.annotation {
        Ok(())
    } else {
        Err(format!(
            "{name}: got {} ({}), want {:?} ({})",
            got.display(),
            got.annotation().as_str(),
            want.value,
            want.annotation
        ))
    }
}

/// Compare the library against the oracle on one frame.
pub fn check_oracle(frame: &AuditFrame) -> Result<(), String> {
    let o = oracle(frame.y_predicted(), frame.y_corrected(), frame.group());
    let e = |e: flipaudit::Error| e.to_string();
    let overall = summarize_flips(frame, None).map_err(e)?;
    let (privileged, unprivileged) = split_by_group(frame).map_err(e)?;
    let pm = compute_proportionality(frame).map_err(e)?;

    let checks = [
        (&overall, &o.overall, "overall"),
        (&unprivileged.summary, &o.groups[0], "group 0"),
        (&privileged.summary, &o.groups[1], "group 1"),
    ];
    for (s, w, label) in checks {
        let c = w.counts;
        if (s.instances, s.n_flips, s.n_favorable, s.n_unfavorable) != (c.n, c.flips, c.favorable, c.harmful) {
            return Err(format!("{label} counts: got {s:?}, want {c:?}"));
        }
        matches(&format!("{label} FR"), &s.flip_rate, &w.fr, TOL)?;
        matches(&format!("{label} HFP"), &s.hfp, &w.hfp, TOL)?;
        matches(&format!("{label} DFR"), &s.dfr, &w.dfr, TOL)?;
    }
    let pairs = [
        ("FRD", pm.frd, o.frd),
        ("DI", pm.di, o.di),
        ("FD", pm.fd, o.fd),
        ("RFD", pm.rfd, o.rfd),
        ("HFPD", pm.hfpd, o.hfpd),
        ("HDI", pm.hdi, o.hdi),
        ("HFD", pm.hfd, o.hfd),
        ("RHFD", pm.rhfd, o.rhfd),
    ];
    for (name, got, w) in pairs {
        matches(name, &got, &w, TOL)?;
    }
    Ok(())
}

/// Random frame with both groups present. Flip probabilities are drawn per
/// group from a small set that includes 0 and 1 so degenerate cases come up
/// often.
pub fn random_frame(rng: &mut ChaCha8Rng, max_n: usize) -> AuditFrame {
    const FLIP_P: [f64; 6] = [0.0, 0.0, 0.05, 0.3, 0.7, 1.0];
    let n = rng.random_range(2..=max_n);
    let n0 = rng.random_range(1..n);
    let mut group: Vec<u8> = (0..n).map(|i| u8::from(i >= n0)).collect();
    group.shuffle(rng);
    let pos_p = [rng.random::<f64>(), rng.random::<f64>()];
    let up_p = [FLIP_P[rng.random_range(0..6)], FLIP_P[rng.random_range(0..6)]];
    let down_p = [FLIP_P[rng.random_range(0..6)], FLIP_P[rng.random_range(0..6)]];
    let mut pred = Vec::with_capacity(n);
    let mut corr = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(n);
    for &g in &group {
        let g = usize::from(g);
        let p = u8::from(rng.random_bool(pos_p[g]));
        let flip = if p == 1 {
            rng.random_bool(down_p[g])
        } else {
            rng.random_bool(up_p[g])
        };
        pred.push(p);
        corr.push(if flip { 1 - p } else { p });
        truth.push(u8::from(rng.random_bool(0.5)));
    }
    AuditFrame::new(pred, corr, group, Some(truth)).expect("generated frame is valid")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Proptest strategy over frames of size 2..=max_n with both groups present.
pub fn frame_strategy(max_n: usize) -> impl Strategy<Value = AuditFrame> {
    (2..=max_n)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0u8..=1, n),
                prop::collection::vec(0u8..=1, n),
                prop::collection::vec(0u8..=1, n),
            )
        })
        .prop_filter("both groups present", |(_, _, g)| g.contains(&0) && g.contains(&1))
        .prop_map(|(p, c, g)| AuditFrame::new(p, c, g, None).unwrap())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Partition, aggregation, symmetry, swap and bound invariants on one frame.
pub fn check_invariants(frame: &AuditFrame) -> Result<(), String> {
    let e = |e: flipaudit::Error| e.to_string();
    let overall = summarize_flips(frame, None).map_err(e)?;
    let (p, u) = split_by_group(frame).map_err(e)?;
    let (sp, su) = (&p.summary, &u.summary);

    if p.size + u.size != frame.len()
        || sp.n_flips + su.n_flips != overall.n_flips
        || sp.n_favorable + su.n_favorable != overall.n_favorable
        || sp.n_unfavorable + su.n_unfavorable != overall.n_unfavorable
    {
        return Err("partition identity broken".into());
    }
    if overall.n_favorable + overall.n_unfavorable != overall.n_flips {
        return Err("favorable + harmful != flips".into());
    }

    let n = frame.len() as f64;
    let lhs = n * overall.rate();
    let rhs = u.size as f64 * su.rate() + p.size as f64 * sp.rate();
    if !close(lhs, rhs) {
        return Err(format!("n·FR = {lhs} but n0·FR0 + n1·FR1 = {rhs}"));
    }

    let pm = compute_proportionality(frame).map_err(e)?;
    let swapped = compute_proportionality(&frame.swapped_groups()).map_err(e)?;
    if pm != swapped {
        return Err(format!("group swap changed metrics: {pm:?} vs {swapped:?}"));
    }

    let back = summarize_flips(&frame.swapped_labels(), None).map_err(e)?;
    let dfr_ok = match (overall.dfr.value(), back.dfr.value()) {
        (None, Some(r)) | (Some(r), None) => r == 0.0,
        (Some(a), Some(b)) => close(a * b, 1.0),
        (None, None) => false,
    };
    if !dfr_ok {
        return Err(format!("DFR swap law: {} vs {}", overall.dfr, back.dfr));
    }

    let unit = |name: &str, v: &MetricValue| match v.value() {
        Some(x) if (0.0..=1.0).contains(&x) => Ok(()),
        _ => Err(format!("{name} = {v} outside [0, 1]")),
    };
    for s in [&overall, sp, su] {
        unit("FR", &s.flip_rate)?;
        unit("HFP", &s.hfp)?;
    }
    unit("RFD", &pm.rfd)?;
    unit("RHFD", &pm.rhfd)?;
    for (name, v) in [("DI", pm.di), ("HDI", pm.hdi)] {
        if v.value().is_some_and(|x| x < 1.0) {
            return Err(format!("{name} = {v} below 1"));
        }
    }
    Ok(())
}

/// Band never moves toward Acceptable as the distance from ideal grows.
pub fn check_monotone(metric: Metric, threshold: Threshold, a: f64, b: f64) -> Result<(), String> {
    let mut config = ThresholdConfig::default();
    config.set(metric, threshold).map_err(|e| e.to_string())?;
    let ideal = threshold.ideal;
    let (near, far) = if (a - ideal).abs() <= (b - ideal).abs() {
        (a, b)
    } else {
        (b, a)
    };
    let band_near = config.classify(metric, &MetricValue::regular(near));
    let band_far = config.classify(metric, &MetricValue::regular(far));
    let band_inf = config.classify(metric, &MetricValue::infinite(flipaudit::Annotation::OneValueIsZero));
    if band_near > band_far || band_inf != Band::Disproportionate {
        return Err(format!(
            "{metric:?}: |{near} - {ideal}| -> {band_near:?} but |{far} - {ideal}| -> {band_far:?}"
        ));
    }
    Ok(())
}

/// Every subset of positions, walked in Gray-code order, and the fewest
/// flips that bring |SP| within epsilon.
pub fn brute_force_min_flips(pred: &[u8], group: &[u8], epsilon: f64) -> usize {
    let n = pred.len();
    assert!(n <= 24, "brute force is exponential");
    let size = [
        group.iter().filter(|&&g| g == 0).count(),
        group.iter().filter(|&&g| g == 1).count(),
    ];
    let mut pos = [0usize; 2];
    for (&y, &g) in pred.iter().zip(group) {
        pos[usize::from(g)] += usize::from(y);
    }
    let mut labels = pred.to_vec();
    let gap_ok = |pos: &[usize; 2]| {
        let gap = pos[0] as f64 / size[0] as f64 - pos[1] as f64 / size[1] as f64;
        gap.abs() <= epsilon
    };
    let mut best = if gap_ok(&pos) { 0 } else { usize::MAX };
    let mut flipped = 0usize;
    for k in 1u64..(1u64 << n) {
        let bit = k.trailing_zeros() as usize;
        let g = usize::from(group[bit]);
        if labels[bit] == pred[bit] {
            flipped += 1;
        } else {
            flipped -= 1;
        }
        if labels[bit] == 1 {
            pos[g] -= 1;
        } else {
            pos[g] += 1;
        }
        labels[bit] = 1 - labels[bit];
        if flipped < best && gap_ok(&pos) {
            best = flipped;
        }
    }
    best
}
