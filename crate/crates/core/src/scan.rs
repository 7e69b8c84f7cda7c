//! Region scan of local achievability over the `(a, b)` prior family of
//! Example 1.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nlwe::{theorem2_locc_achievable, Verdict};
use crate::scenarios::{ab_priors, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionScanConfig {
    pub a_steps: usize,
    pub b_steps: usize,
}

impl RegionScanConfig {
    pub fn new(a_steps: usize, b_steps: usize) -> Result<Self> {
        if a_steps < 2 || b_steps < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 steps per axis, got {a_steps}×{b_steps}"
            )));
        }
        Ok(Self { a_steps, b_steps })
    }

    /// Grid value `i/(steps + 1)`, `i = 1..=steps`, strictly inside (0, 1).
    pub fn a(&self, i: usize) -> f64 {
        i as f64 / (self.a_steps + 1) as f64
    }

    pub fn b(&self, j: usize) -> f64 {
        j as f64 / (self.b_steps + 1) as f64
    }

    /// The analytic rule evaluated in exact integer arithmetic on grid
    /// indices.
    pub fn analytic_locc(&self, i: usize, j: usize) -> bool {
        let (na, nb) = ((self.a_steps + 1) as u128, (self.b_steps + 1) as u128);
        let (i, j) = (i as u128, j as u128);
        // a ≥ b  ⟺  i·nb ≥ j·na
        let diag = i * nb >= j * na;
        // 169a ≥ 125(1 − b)  ⟺  169·i·nb ≥ 125·(nb − j)·na
        let curve = 169 * i * nb >= 125 * (nb - j) * na;
        diag && curve
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellVerdict {
    #[serde(rename = "LOCC")]
    Locc,
    #[serde(rename = "NLWE")]
    Nlwe,
}

impl CellVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            CellVerdict::Locc => "LOCC",
            CellVerdict::Nlwe => "NLWE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanCell {
    /// 1-based grid indices.
    pub i: usize,
    pub j: usize,
    pub a: f64,
    pub b: f64,
    pub verdict: CellVerdict,
}

#[derive(Debug, Clone)]
pub struct RegionScan {
    pub config: RegionScanConfig,
    /// Row-major: `a` outer, `b` inner.
    pub cells: Vec<ScanCell>,
}

/// Evaluates the local-achievability verdict at every grid cell.
pub fn region_scan(config: RegionScanConfig) -> Result<RegionScan> {
    let base = Scenario::Example1.uniform();
    let space = Scenario::Example1.space().expect("example1 is bipartite");
    let cells = (0..config.a_steps * config.b_steps)
        .into_par_iter()
        .map(|flat| {
            let i = flat / config.b_steps + 1;
            let j = flat % config.b_steps + 1;
            let (a, b) = (config.a(i), config.b(j));
            let ensemble = base.with_priors(ab_priors(a, b)?)?;
            let verdict = match theorem2_locc_achievable(&ensemble, &space)?.verdict {
                Verdict::LoccAchievable => CellVerdict::Locc,
                _ => CellVerdict::Nlwe,
            };
            Ok(ScanCell { i, j, a, b, verdict })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionScan { config, cells })
}

impl RegionScan {
    /// Cells where the computed verdict disagrees with the analytic rule.
    pub fn mismatches(&self) -> Vec<ScanCell> {
        self.cells
            .iter()
            .filter(|c| (c.verdict == CellVerdict::Locc) != self.config.analytic_locc(c.i, c.j))
            .copied()
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,b,verdict\n");
        for c in &self.cells {
            let _ = writeln!(out, "{},{},{}", c.a, c.b, c.verdict.as_str());
        }
        out
    }

    /// Flat two-colour heatmap with the boundary lines `a = b` and
    /// `a = (125/169)(1 − b)` overlaid. `a` runs along x, `b` along y.
    pub fn to_svg(&self) -> String {
        const SIZE: f64 = 600.0;
        const MARGIN: f64 = 50.0;
        let (na, nb) = (self.config.a_steps as f64, self.config.b_steps as f64);
        let (cw, ch) = (SIZE / na, SIZE / nb);
        let x = |a: f64| MARGIN + a * SIZE;
        let y = |b: f64| MARGIN + (1.0 - b) * SIZE;
        let mut s = String::new();
        let total = SIZE + 2.0 * MARGIN;
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for c in &self.cells {
            let fill = match c.verdict {
                CellVerdict::Locc => "#f2d64b",
                CellVerdict::Nlwe => "#5fb85f",
            };
            let cx = MARGIN + (c.i - 1) as f64 * cw;
            let cy = MARGIN + (nb - c.j as f64) * ch;
            let _ = writeln!(
                s,
                r#"<rect x="{cx:.3}" y="{cy:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
                cw + 0.05,
                ch + 0.05
            );
        }
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="2"/>"#,
            x(0.0),
            y(0.0),
            x(1.0),
            y(1.0)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="2" stroke-dasharray="8 4"/>"#,
            x(125.0 / 169.0),
            y(0.0),
            x(0.0),
            y(1.0)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="18" text-anchor="middle">a</text>"#,
            MARGIN + SIZE / 2.0,
            total - 15.0
        );
        let _ = writeln!(
            s,
            r#"<text x="20" y="{:.1}" font-size="18" text-anchor="middle">b</text>"#,
            MARGIN + SIZE / 2.0
        );
        s.push_str("</svg>\n");
        s
    }
}
