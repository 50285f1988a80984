use anyhow::{bail, Context};
use serde_json::{json, Value};
use spherevol::bundle::{graph_surface_mesh, sup_abs_mean_curvature, CurvatureGrid, DEFAULT_COLLAR};
use spherevol::index::{
    audit_chain, ellipse_length, ellipse_length_agm, index_report, lower_bound, verify_bound,
    ChainVariant, IndexConfig,
};
use spherevol::minimizers::{
    canonical_field, optimize_field, GridField, OptimizeConfig, PerturbedField,
};
use spherevol::quadrature::{volume, QuadratureConfig};

use crate::field_spec::Resolution;
use crate::manifest;
use crate::output::{Report, Table};
use crate::{Command, QuadFlags, Variant};

const CHAIN_LABELS: [&str; 5] = [
    "full_volume",
    "theta2_dropped",
    "angle_form",
    "stokes_substituted",
    "bound",
];

impl QuadFlags {
    fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            n_alpha: self.n_alpha,
            gauss_order: self.gauss_order,
            n_beta: self.n_beta,
            rel_tol: self.rel_tol,
            ..QuadratureConfig::default()
        }
    }
}

fn kv(command: &'static str, payload: Value) -> Report {
    let table = Table::key_values(&payload);
    Report {
        command,
        payload,
        table,
    }
}

pub fn execute(cmd: &Command) -> anyhow::Result<Report> {
    match cmd {
        Command::Volume { field, quad } => {
            let f = field.load()?;
            let cfg = quad.config();
            let r = volume(f.as_ref(), &cfg)?;
            Ok(kv(
                "volume",
                json!({
                    "field": field.to_string(),
                    "value": r.value,
                    "error": r.error_estimate,
                    "resolution_error": r.resolution_error,
                    "converged": r.converged,
                    "per_cutoff": r.per_cutoff,
                    "quadrature": cfg,
                }),
            ))
        }
        Command::Bound { k, k_max } => bound(*k, *k_max),
        Command::Verify { field, quad } => {
            let f = field.load()?;
            let r = verify_bound(f.as_ref(), &quad.config(), &IndexConfig::default())?;
            let mut payload = serde_json::to_value(&r)?;
            payload["field"] = json!(field.to_string());
            Ok(kv("verify", payload))
        }
        Command::Audit {
            field,
            k,
            variant,
            quad,
        } => {
            let f = field.load()?;
            let k = match k {
                Some(k) => *k,
                None => 1 + f.winding().abs(),
            };
            let variant = match variant {
                Variant::Absolute => ChainVariant::Absolute,
                Variant::AsPrinted => ChainVariant::AsPrinted,
            };
            let c = audit_chain(f.as_ref(), k, &quad.config(), variant)?;
            let mut table = Table::new(&["step", "quantity", "value", "error_estimate"]);
            let mut chain = Vec::new();
            for (i, label) in CHAIN_LABELS.iter().enumerate() {
                table.push([(i + 1).to_string(), label.to_string(), c.values[i].to_string(), c.error_estimates[i].to_string()]);
                chain.push(json!({"quantity": label, "value": c.values[i], "error_estimate": c.error_estimates[i]}));
            }
            Ok(Report {
                command: "audit",
                payload: json!({
                    "field": field.to_string(),
                    "k": c.k,
                    "variant": c.variant,
                    "relabeled": c.relabeled,
                    "chain": chain,
                    "tolerance": c.tolerance,
                    "monotone": c.is_monotone(),
                }),
                table,
            })
        }
        Command::Index {
            field,
            delta0,
            samples,
        } => {
            let f = field.load()?;
            let cfg = IndexConfig {
                delta0: *delta0,
                n_samples: *samples,
            };
            let r = index_report(f.as_ref(), &cfg)?;
            Ok(kv(
                "index",
                json!({
                    "field": field.to_string(),
                    "north": r.index_north,
                    "south": r.index_south,
                    "sup_index": r.sup_index,
                    "samples_used": r.samples_used,
                }),
            ))
        }
        Command::Optimize {
            k,
            seed,
            amplitude,
            iters,
            resolution,
            cutoff,
            out,
        } => {
            let start = PerturbedField::random(*k, *amplitude, *seed)?;
            let init = GridField::sample(&start, resolution.n_alpha, resolution.n_beta, *cutoff)?;
            let index_cfg = IndexConfig::default();
            let index_before = index_report(&init, &index_cfg)?;
            let cfg = OptimizeConfig {
                max_iters: *iters,
                ..OptimizeConfig::default()
            };
            let r = optimize_field(*k, init, &cfg)?;
            let index_after = index_report(&r.field, &index_cfg)?;
            if let Some(path) = out {
                std::fs::write(path, serde_json::to_string(&r.field)?)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            let last = *r.trace.last().expect("trace starts with the initial value");
            let floor = r.bound - r.tol_disc;
            let mut table = Table::new(&["iteration", "discrete_volume"]);
            for (i, e) in r.trace.iter().enumerate() {
                table.push([i.to_string(), e.to_string()]);
            }
            Ok(Report {
                command: "optimize",
                payload: json!({
                    "k": k,
                    "seed": seed,
                    "amplitude": amplitude,
                    "resolution": resolution.to_string(),
                    "cutoff": cutoff,
                    "bound": r.bound,
                    "tol_disc": r.tol_disc,
                    "initial": r.trace[0],
                    "final": last,
                    "rel_gap": (last - r.bound) / r.bound,
                    "iterations": r.iterations,
                    "converged": r.converged,
                    "gradient_norm": r.gradient_norm,
                    "descent": r.trace.windows(2).all(|w| w[1] <= w[0]),
                    "above_floor": r.trace.iter().all(|&e| e >= floor),
                    "index_preserved": (index_before.index_north, index_before.index_south)
                        == (index_after.index_north, index_after.index_south),
                    "trace": r.trace,
                }),
                table,
            })
        }
        Command::Surface {
            k,
            resolution,
            mean_curvature,
            h,
            export,
        } => {
            if *mean_curvature {
                curvature(*k, *resolution, *h)
            } else {
                surface(*k, *resolution, export.as_deref())
            }
        }
        Command::Replay { manifest: path } => manifest::replay(path),
    }
}

fn bound(k: Option<i64>, k_max: Option<i64>) -> anyhow::Result<Report> {
    let ks: Vec<i64> = match (k, k_max) {
        (Some(k), _) => vec![k],
        (None, Some(m)) if m >= 1 => (1..=m).collect(),
        _ => bail!("--k-max must be at least 1"),
    };
    let mut table = Table::new(&["k", "ellipse_length", "ellipse_length_agm", "bound"]);
    let mut rows = Vec::new();
    for &k in &ks {
        let (l, agm, b) = (ellipse_length(k)?, ellipse_length_agm(k)?, lower_bound(k)?);
        table.push([k.to_string(), l.to_string(), agm.to_string(), b.to_string()]);
        rows.push(json!({"k": k, "ellipse_length": l, "ellipse_length_agm": agm, "bound": b}));
    }
    let payload = if k.is_some() {
        rows.remove(0)
    } else {
        json!({ "curve": rows })
    };
    Ok(Report {
        command: "bound",
        payload,
        table,
    })
}

fn curvature(k: i64, resolution: Option<Resolution>, h: f64) -> anyhow::Result<Report> {
    let res = resolution.unwrap_or(Resolution {
        n_alpha: 40,
        n_beta: 160,
    });
    let grid = CurvatureGrid {
        n_alpha: res.n_alpha,
        n_beta: res.n_beta,
        collar: DEFAULT_COLLAR,
        h,
        richardson: true,
    };
    let r = sup_abs_mean_curvature(&canonical_field(k, 0.0)?, &grid)?;
    Ok(kv(
        "surface",
        json!({
            "k": k,
            "sup_abs_H": r.sup_abs_h,
            "grid": r.grid,
            "h": h,
            "at": r.at,
        }),
    ))
}

fn surface(
    k: i64,
    resolution: Option<Resolution>,
    export: Option<&std::path::Path>,
) -> anyhow::Result<Report> {
    let res = resolution.unwrap_or(Resolution {
        n_alpha: 64,
        n_beta: 256,
    });
    let mesh = graph_surface_mesh(k, res.n_alpha, res.n_beta)?;
    let area = mesh.surface_area();
    let bound = lower_bound(k)?;
    let o = mesh.orientability();
    let mut payload = json!({
        "k": k,
        "resolution": res.to_string(),
        "vertices": mesh.vertex_count(),
        "edges": mesh.edge_count(),
        "faces": mesh.faces.len(),
        "euler_characteristic": mesh.euler_characteristic(),
        "orientable": o.orientable,
        "closed": mesh.is_closed(),
        "area": area,
        "bound": bound,
        "area_rel_error": (area - bound) / bound,
    });
    if let Some(path) = export {
        let side = mesh
            .export(path)
            .with_context(|| format!("cannot export mesh to {}", path.display()))?;
        payload["off"] = json!(path.display().to_string());
        payload["sidecar"] = json!(side.display().to_string());
    }
    Ok(kv("surface", payload))
}
