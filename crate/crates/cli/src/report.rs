//! Run reports: plain text by default, JSON on request.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

/// Wall-clock time per pipeline phase, kept apart from the deterministic fields.
#[derive(Debug, Default, Serialize)]
pub struct Timings(BTreeMap<String, u128>);

impl Timings {
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.insert(phase.to_string(), start.elapsed().as_millis());
        out
    }

    pub fn line(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}ms")).collect();
        format!("timing: {}", parts.join(" "))
    }
}

#[derive(Debug, Serialize)]
pub struct IntersectionSummary {
    pub full: String,
    pub reduced: String,
    /// Both checks ran to a verdict and the verdicts agree.
    pub agree: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub input: String,
    pub order: usize,
    pub diagram: String,
    pub intersection: IntersectionSummary,
    pub f_vector: Option<String>,
    pub flags: Option<usize>,
    pub orbits: Option<usize>,
    pub classification: Option<String>,
    pub aut_order: Option<usize>,
    /// Facets around each co-rank-2 face: size to number of faces.
    pub section_sizes: BTreeMap<usize, usize>,
    pub checks: BTreeMap<String, bool>,
    pub timings_ms: Timings,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|&ok| ok) && self.intersection.agree != Some(false)
    }

    pub fn render(&self, with_timing: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "input: {}", self.input);
        let _ = writeln!(s, "order: {}", self.order);
        let _ = writeln!(s, "diagram: {}", self.diagram);
        let agree = match self.intersection.agree {
            Some(true) => "agree",
            Some(false) => "DISAGREE",
            None => "single check",
        };
        let _ = writeln!(s, "intersection: full={} reduced={} ({agree})", self.intersection.full, self.intersection.reduced);
        if let (Some(fv), Some(flags), Some(orbits), Some(class)) = (&self.f_vector, self.flags, self.orbits, &self.classification) {
            let _ = writeln!(s, "fvec = {fv} flags={flags} orbits={orbits} class={class}");
        }
        if let Some(aut) = self.aut_order {
            let _ = writeln!(s, "automorphisms: {aut}");
        }
        if !self.section_sizes.is_empty() {
            let hist: Vec<String> = self.section_sizes.iter().map(|(size, count)| format!("{size}x{count}")).collect();
            let _ = writeln!(s, "co-rank-2 sections: {}", hist.join(" "));
        }
        for (name, ok) in &self.checks {
            let _ = writeln!(s, "check {name}: {}", if *ok { "pass" } else { "FAIL" });
        }
        if with_timing {
            let _ = writeln!(s, "{}", self.timings_ms.line());
        }
        s
    }
}
