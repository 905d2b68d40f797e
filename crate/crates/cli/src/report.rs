//! Human-readable and JSON analysis reports.

use crystalflex::flexes::{FlexDimension, FlexWitness, Rigidity, RigidityVerdict};
use crystalflex::framework::CrystalFramework;
use crystalflex::spectrum::{Certification, GeometricSpectrum, SpectrumKind};
use num::complex::Complex64;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn fmt_complex(c: Complex64) -> String {
    format!("{:+.12}{:+.12}i", c.re, c.im)
}

pub fn fmt_point(p: &[Complex64]) -> String {
    let parts: Vec<String> = p.iter().map(|c| fmt_complex(*c)).collect();
    format!("({})", parts.join(", "))
}

pub fn rigidity_str(r: Rigidity) -> &'static str {
    match r {
        Rigidity::Rigid => "rigid",
        Rigidity::Flexible => "flexible",
        Rigidity::Unknown => "unknown",
    }
}

pub fn certification_str(c: Certification) -> &'static str {
    match c {
        Certification::Exact => "exact",
        Certification::Sampled => "sampled",
    }
}

pub fn kind_str(k: SpectrumKind) -> &'static str {
    match k {
        SpectrumKind::Finite => "finite",
        SpectrumKind::PositiveDimensional => "positive_dimensional",
        SpectrumKind::Probabilistic => "probabilistic",
    }
}

fn tri_str(t: Option<bool>) -> String {
    match t {
        Some(true) => "true".into(),
        Some(false) => "false".into(),
        None => "unknown".into(),
    }
}

pub fn spectrum_text(gs: &GeometricSpectrum) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "geometric spectrum: kind={}, certification={}\n",
        kind_str(gs.kind),
        certification_str(gs.certification)
    ));
    for (omega, kdim) in &gs.points {
        out.push_str(&format!(
            "  point omega={} kernel_dim={kdim}\n",
            fmt_point(omega)
        ));
    }
    for comp in &gs.components {
        out.push_str(&format!("  component factor (z-domain): {comp}\n"));
    }
    out
}

pub fn spectrum_json(gs: &GeometricSpectrum) -> serde_json::Value {
    serde_json::json!({
        "kind": kind_str(gs.kind),
        "certification": certification_str(gs.certification),
        "points": gs.points.iter().map(|(omega, kdim)| serde_json::json!({
            "omega": omega.iter().map(|c| vec![c.re, c.im]).collect::<Vec<_>>(),
            "kernel_dim": kdim,
        })).collect::<Vec<_>>(),
        "components": gs.components.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

pub fn verdict_text(v: &RigidityVerdict) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "first_order_rigid: {}\n",
        rigidity_str(v.first_order_rigid)
    ));
    out.push_str(&format!("  gamma_trivial: {}\n", tri_str(v.gamma_trivial)));
    out.push_str(&format!(
        "  periodic_kernel_is_translations: {}\n",
        v.periodic_kernel_is_translations
    ));
    out.push_str(&format!(
        "  fper_rank_extremal: {}\n",
        v.fper_rank_extremal
    ));
    out.push_str(&format!(
        "  psi_rank_extremal: {}\n",
        tri_str(v.psi_rank_extremal)
    ));
    out.push_str(&format!(
        "  certification: {}\n",
        certification_str(v.certification)
    ));
    out.push_str(&format!(
        "  rank thresholds: periodic={}, transfer={}, flex_lattice={}\n",
        v.thresholds.periodic, v.thresholds.transfer, v.thresholds.flex_lattice
    ));
    out.push_str(&spectrum_text(&v.spectrum));
    match &v.witness {
        Some(FlexWitness::FactorPeriodic(f)) => {
            out.push_str(&format!(
                "witness: factor-periodic flex at omega={}\n{}",
                fmt_point(&f.omega),
                f.coefficient_table()
            ));
        }
        Some(FlexWitness::FlexibleLattice(f)) => {
            out.push_str("witness: flexible-lattice flex\n");
            let u0: Vec<String> = f.u0.iter().map(|c| fmt_complex(*c)).collect();
            out.push_str(&format!("  u0 = [{}]\n", u0.join(", ")));
            let d = f.x.nrows();
            for i in 0..d {
                let row: Vec<String> = (0..d).map(|j| fmt_complex(f.x[(i, j)])).collect();
                out.push_str(&format!("  X[{i}] = [{}]\n", row.join(", ")));
            }
        }
        None => {}
    }
    out
}

pub fn analysis_json(
    fw: &CrystalFramework,
    v: &RigidityVerdict,
    dimension: Option<&FlexDimension>,
    svd_tol: f64,
) -> serde_json::Value {
    let dim_value = dimension.map(|d| match d {
        FlexDimension::Infinite => serde_json::json!("infinite"),
        FlexDimension::Finite(n) => serde_json::json!(n),
        FlexDimension::Unknown => serde_json::json!("unknown"),
    });
    serde_json::json!({
        "framework": {
            "dimension": fw.dim,
            "joints": fw.n_joints(),
            "edges": fw.n_edges(),
        },
        "spectrum": spectrum_json(&v.spectrum),
        "gamma_trivial": v.gamma_trivial,
        "periodic_kernel_is_translations": v.periodic_kernel_is_translations,
        "fper_rank_extremal": v.fper_rank_extremal,
        "psi_rank_extremal": v.psi_rank_extremal,
        "first_order_rigid": rigidity_str(v.first_order_rigid),
        "certification": certification_str(v.certification),
        "dimension": dim_value,
        "tool_version": TOOL_VERSION,
        "tolerances": {
            "svd_tol": svd_tol,
            "window_check_tol": 1e-8,
            "cluster_radius": 1e-6,
        },
    })
}
