//! Command implementations. Each returns a [`Report`]; errors carry the exit
//! code through [`CliError`].

use std::path::Path;

use ternlab::embedding::{
    build_embedding, cstar_gap, cstar_identity_witness, pi_homomorphism_residual, pi_injectivity, pi_norm_lower_bounds,
};
use ternlab::ideals::{embed_ideal, generated_ideal, quotient, TernaryIdeal};
use ternlab::instances::{self, DEMO_NAMES};
use ternlab::radical::{abstract_envelope, ternary_radical, AssocAlgebra};
use ternlab::ternary::{check_axioms, restrict_to_subspace, zettl_decompose, TernarySpace};
use ternlab::wedderburn::{anti_m2, solve_wedderburn, star_obstruction};
use ternlab::{rng, C};

use crate::instance_file::{IdealFile, IdealSpec, InstanceFile};
use crate::report::Report;
use crate::{CliError, Options};

/// Reads and validates an instance file.
pub fn load_instance(path: &Path) -> Result<(String, TernarySpace<f64>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let file = InstanceFile::parse(&text)?;
    let m = file.to_space()?;
    Ok((file.name, m))
}

fn presentation(m: &TernarySpace<f64>) -> &'static str {
    if m.is_blocks() {
        "blocks"
    } else {
        "structure_constants"
    }
}

pub fn verify(m: &TernarySpace<f64>, opts: &Options) -> Report {
    let mut r = check_axioms(m, opts.samples, opts.seed);
    r.tolerance = opts.tol;
    let mut rep = Report::new("verify");
    rep.set("dim", m.dim())
        .set("presentation", presentation(m))
        .set("samples", r.samples)
        .set("basis_quintuples", r.basis_quintuples)
        .set("conjugate_linearity", r.conjugate_linearity)
        .set("associativity_outer", r.associativity_outer)
        .set("associativity_inner", r.associativity_inner)
        .set("norm_bound", r.norm_bound)
        .set("cube_norm", r.cube_norm)
        .set("norms_available", r.norms_available)
        .set("tolerance", r.tolerance)
        .set("failing", r.failing());
    rep.fail_if(!r.passed());
    rep
}

pub fn decompose(m: &TernarySpace<f64>, opts: &Options) -> Result<Report, CliError> {
    let z = zettl_decompose(m, opts.seed)?;
    let (p, q) = z.dims();
    let mut rep = Report::new("decompose");
    rep.set("dim", m.dim())
        .set("dim_plus", p)
        .set("dim_minus", q)
        .set("batches", z.batches)
        .set("sign_violation", z.sign_violation);
    Ok(rep)
}

pub fn embed(m: &TernarySpace<f64>, opts: &Options) -> Result<Report, CliError> {
    let e = build_embedding(m)?;
    let layout = e.layout();
    let pairs = opts.samples.min(200);
    let hom = pi_homomorphism_residual(&e, pairs, opts.seed)?;
    let inj = pi_injectivity(&e)?;
    let mut rng = rng::seeded(opts.seed.wrapping_add(1));
    let mut certified = true;
    for k in 0..pairs.min(50) {
        let a = e.random_element(&mut rng);
        certified &= pi_norm_lower_bounds(&e, &a, 20, opts.seed.wrapping_add(k as u64))?.certified;
    }
    let mut rep = Report::new("embed");
    rep.set("dim", e.dim())
        .set("corner_dims", [layout.l.len(), layout.m.len(), layout.mbar.len(), layout.r.len()])
        .set("has_anti_block", e.has_anti_block())
        .set("pi_homomorphism_residual", hom)
        .set("pi_relative_min_singular", inj)
        .set("pi_kernel_dim", if inj > opts.tol { 0 } else { 1 })
        .set("pi_bounds_certified", certified);
    rep.fail_if(hom > opts.tol || inj <= opts.tol || !certified);
    if e.has_anti_block() {
        let w = cstar_identity_witness(&e, opts.seed)?;
        rep.set("cstar_witness_gap", w.gap);
        rep.fail_if(w.gap <= 0.1);
    } else {
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let a = e.random_element(&mut rng);
            let n = e.norm(&a)?;
            if n > 0.0 {
                worst = worst.max(cstar_gap(&e, &a.scale(C::new(1.0 / n, 0.0)))?);
            }
        }
        rep.set("cstar_identity_max_gap", worst);
        rep.fail_if(worst > opts.tol);
    }
    Ok(rep)
}

pub fn radical(m: &TernarySpace<f64>, opts: &Options) -> Result<Report, CliError> {
    let r = ternary_radical(m, opts.samples, opts.seed)?;
    let mut rep = Report::new("radical");
    rep.set("dim", m.dim())
        .set("radical_dim", r.dim())
        .set("semisimple", r.is_semisimple())
        .set("envelope_dim", r.envelope_dim)
        .set("envelope_radical_dim", r.envelope_radical_dim)
        .set("qi_failures", r.qi_failures)
        .set("borderline", r.borderline);
    rep.fail_if(r.qi_failures > 0);
    Ok(rep)
}

pub fn quotient_cmd(m: &TernarySpace<f64>, ideal: &IdealFile, opts: &Options) -> Result<Report, CliError> {
    let j = match ideal.elements(m.dim())? {
        IdealSpec::Basis(b) => TernaryIdeal::new(m, &b)?,
        IdealSpec::Generators(g) => generated_ideal(m, &g)?,
    };
    let q = quotient(m, &j)?;
    let mut axioms = check_axioms(&q.space, opts.samples, opts.seed);
    axioms.tolerance = opts.tol;
    let mut rep = Report::new("quotient");
    rep.set("dim", m.dim())
        .set("ideal_dim", j.dim())
        .set("quotient_dim", q.space.dim())
        .set("well_defined_residual", q.well_defined_residual)
        .set("quotient_failing_identities", axioms.failing());
    rep.fail_if(q.well_defined_residual > opts.tol || !axioms.passed());
    if let Ok(e) = build_embedding(m) {
        let a = embed_ideal(&e, &j)?;
        rep.set("embedded_ideal_dim", a.cols());
    }
    let (mp, mm) = zettl_decompose(m, opts.seed)?.dims();
    let (jp, jm) = match j.sign_dims() {
        Ok(d) => d,
        Err(_) => {
            let (sc, _) = restrict_to_subspace(m, &j.basis())?;
            zettl_decompose(&TernarySpace::Structure(sc), opts.seed)?.dims()
        }
    };
    let (qp, qm) = zettl_decompose(&q.space, opts.seed)?.dims();
    let additive = mp == jp + qp && mm == jm + qm;
    rep.set("zettl_dims", [mp, mm]).set("ideal_zettl_dims", [jp, jm]).set("quotient_zettl_dims", [qp, qm]).set(
        "zettl_additive",
        additive,
    );
    rep.fail_if(!additive);
    Ok(rep)
}

pub fn wedderburn(m: &TernarySpace<f64>, target_dim: Option<usize>, opts: &Options) -> Result<Report, CliError> {
    let alg = match m {
        TernarySpace::Blocks(_) => build_embedding(m)?.to_assoc_algebra()?.0,
        TernarySpace::Structure(_) => abstract_envelope(m)?.algebra,
    };
    let d = alg.dim();
    let n = match target_dim {
        Some(n) => n,
        None => {
            let n = (d as f64).sqrt().round() as usize;
            if n * n != d {
                return Err(CliError::Input(format!(
                    "standard embedding has dimension {d}, not a square; pass --target-dim"
                )));
            }
            n
        }
    };
    let sol = solve_wedderburn(&alg, n, opts.seed)?;
    let star = star_obstruction(&sol.map, &alg, &AssocAlgebra::full_matrix(n), opts.samples, opts.seed)?;
    let mut rep = Report::new("wedderburn");
    rep.set("algebra_dim", d)
        .set("target_dim", n)
        .set("residual", sol.residual)
        .set("unit_residual", sol.unit_residual)
        .set("condition", sol.condition)
        .set("restart", sol.restart)
        .set("epsilon_residual", sol.epsilon_residual())
        .set("star_deviation", star.deviation);
    rep.fail_if(sol.residual > opts.tol || sol.unit_residual > opts.tol);
    Ok(rep)
}

/// Products of `E11, E12, E21, E22` in `(M₂(ℂ), ·)`: `(sign, index)` or zero.
const M2_TABLE: [[Option<(i8, usize)>; 4]; 4] = [
    [Some((-1, 0)), Some((-1, 1)), None, None],
    [None, None, Some((1, 0)), Some((-1, 1))],
    [Some((-1, 2)), Some((1, 3)), None, None],
    [None, None, Some((-1, 2)), Some((-1, 3))],
];

const UNIT_NAMES: [&str; 4] = ["E11", "E12", "E21", "E22"];

fn cell_name(cell: &[C<f64>]) -> String {
    let nz: Vec<(usize, &C<f64>)> = cell.iter().enumerate().filter(|(_, z)| **z != C::new(0.0, 0.0)).collect();
    match nz.as_slice() {
        [] => "0".into(),
        [(k, z)] if **z == C::new(1.0, 0.0) => UNIT_NAMES[*k].into(),
        [(k, z)] if **z == C::new(-1.0, 0.0) => format!("-{}", UNIT_NAMES[*k]),
        _ => format!("{cell:?}"),
    }
}

/// The `(M₂(ℂ), ·)` multiplication table, checked cell by cell with zero
/// tolerance, and the same table read off the standard embedding of the
/// scalar anti-TRO.
fn m2_table_report() -> Result<Report, CliError> {
    let alg = anti_m2::<f64>();
    let e = build_embedding(&instances::scalar::<f64>(ternlab::ternary::Sign::Minus))?;
    let (emb, _) = e.to_assoc_algebra()?;
    let mut rows = vec![format!("{:<6}| {}", "", UNIT_NAMES.map(|s| format!("{s:<6}")).join("| "))];
    let mut mismatches = Vec::new();
    let mut embedding_dev = 0.0f64;
    for a in 0..4 {
        let mut cells = Vec::new();
        for b in 0..4 {
            let got: Vec<C<f64>> = (0..4).map(|k| alg.constant(a, b, k)).collect();
            let mut want = vec![C::new(0.0, 0.0); 4];
            if let Some((s, k)) = M2_TABLE[a][b] {
                want[k] = C::new(s as f64, 0.0);
            }
            if got != want {
                mismatches.push(format!("{}·{}", UNIT_NAMES[a], UNIT_NAMES[b]));
            }
            for k in 0..4 {
                embedding_dev = embedding_dev.max((emb.constant(a, b, k) - got[k]).norm());
            }
            cells.push(format!("{:<6}", cell_name(&got)));
        }
        rows.push(format!("{:<6}| {}", UNIT_NAMES[a], cells.join("| ")));
    }
    let mut rep = Report::new("demo m2-anti");
    rep.set("table", rows)
        .set("cells_checked", 16)
        .set("mismatches", mismatches.clone())
        .set("embedding_table_deviation", embedding_dev);
    rep.fail_if(!mismatches.is_empty() || embedding_dev > 1e-12);
    Ok(rep)
}

pub fn demo(name: &str, opts: &Options) -> Result<Report, CliError> {
    let m = instances::demo::<f64>(name).ok_or_else(|| {
        CliError::Input(format!("unknown demo `{name}`; available: {}", DEMO_NAMES.join(", ")))
    })?;
    let mut rep = if name == "m2-anti" { m2_table_report()? } else { Report::new(&format!("demo {name}")) };
    let v = verify(&m, opts);
    let z = decompose(&m, opts)?;
    let r = radical(&m, opts)?;
    rep.set("dim", m.dim())
        .set("axioms_passed", v.passed)
        .set("dim_plus", &z.fields["dim_plus"])
        .set("dim_minus", &z.fields["dim_minus"])
        .set("radical_dim", &r.fields["radical_dim"]);
    rep.fail_if(!v.passed || !r.passed);
    Ok(rep)
}

/// The bundled demo instance as an instance file.
pub fn demo_instance(name: &str) -> Result<InstanceFile, CliError> {
    let m = instances::demo::<f64>(name)
        .ok_or_else(|| CliError::Input(format!("unknown demo `{name}`; available: {}", DEMO_NAMES.join(", "))))?;
    Ok(InstanceFile::from_space(name, &m))
}
