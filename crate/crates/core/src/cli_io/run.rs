use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use super::config::{ConfigError, RunConfig};
use super::table::{ResultTable, TableMeta};
use crate::asymptotic_phase::{kernel_consistency_residual, phase_record, PhaseOptions};
use crate::error::Error;
use crate::kinematics::{relative_speed, Particle, Vec3};
use crate::photon_cloud::{cloud_log_coefficient, fock_displacement_sim, vacuum_overlap, CloudSpec};
use crate::qubit_entanglement::{
    density_from_amplitude, dressed_entropy, dressed_entropy_identity_check, entropy_trace, normalized_entanglement,
    reduce_particle1, EntropyConvention, NormalizationMode,
};
use crate::soft_integrals::{
    exponent_at, null_projection_max, perturb_speed, regulator_scan, soft_breakdown, Regulators, ScanSetup,
};

/// Off-shell sweep used by `cancel` when no explicit perturbation is given.
pub const CANCEL_SWEEP: [f64; 6] = [0.0, 5e-2, 5e-3, 5e-4, 5e-5, 5e-6];

/// Allowed residual of the dressed-entropy identity before `entangle` fails.
pub const ENTROPY_IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Subcommand {
    Kin,
    Phase,
    Soft,
    Scan,
    Cancel,
    Cloud,
    Fock,
    Entangle,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Kin => "kin",
            Subcommand::Phase => "phase",
            Subcommand::Soft => "soft",
            Subcommand::Scan => "scan",
            Subcommand::Cancel => "cancel",
            Subcommand::Cloud => "cloud",
            Subcommand::Fock => "fock",
            Subcommand::Entangle => "entangle",
        }
    }
}

impl FromStr for Subcommand {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as clap::ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{subcommand}: {source}")]
    Module { subcommand: &'static str, source: Error },
}

impl RunError {
    /// CLI exit code: 2 for configuration/input problems, 3 for numerical
    /// contract violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Module { source, .. } if source.is_contract() => 3,
            RunError::Module { .. } => 2,
        }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    sub: Subcommand,
}

impl Ctx<'_> {
    fn wrap<T>(&self, r: crate::Result<T>) -> Result<T, RunError> {
        r.map_err(|source| RunError::Module {
            subcommand: self.sub.name(),
            source,
        })
    }

    fn particles(&self) -> Result<(Particle, Particle), RunError> {
        let p = &self.cfg.particles;
        Ok((
            self.wrap(Particle::new(p.m, p.charges[0], Vec3::from(p.v1)))?,
            self.wrap(Particle::new(p.m, p.charges[1], Vec3::from(p.v2)))?,
        ))
    }

    fn table(&self, columns: &[&str]) -> ResultTable {
        ResultTable::new(columns, TableMeta::new(self.sub.name(), &self.cfg.hash()))
    }
}

/// Runs one subcommand. Output depends only on the configuration and the
/// tool version.
pub fn run(sub: Subcommand, cfg: &RunConfig) -> Result<ResultTable, RunError> {
    cfg.validate()?;
    let ctx = Ctx { cfg, sub };
    match sub {
        Subcommand::Kin => kin(&ctx),
        Subcommand::Phase => phase(&ctx),
        Subcommand::Soft => soft(&ctx),
        Subcommand::Scan => scan(&ctx),
        Subcommand::Cancel => cancel(&ctx),
        Subcommand::Cloud => cloud(&ctx),
        Subcommand::Fock => fock(&ctx),
        Subcommand::Entangle => entangle(&ctx),
    }
}

fn kin(ctx: &Ctx<'_>) -> Result<ResultTable, RunError> {
    let (a, b) = ctx.particles()?;
    let u = ctx.wrap(relative_speed(&a.momentum(), &b.momentum()))?;
    let mut t = ctx.table(&[
        "particle",
        "mass",
        "charge",
        "vx",
        "vy",
        "vz",
        "gamma",
        "E",
        "px",
        "py",
        "pz",
        "mass_shell_residual",
        "relative_speed",
    ]);
    for (i, p) in [a, b].iter().enumerate() {
        let mom = p.momentum();
        t.push(vec![
            (i + 1) as f64,
            p.mass,
            p.charge(),
            p.velocity.x,
            p.velocity.y,
            p.velocity.z,
            p.gamma(),
            mom.t,
            mom.x,
            mom.y,
            mom.z,
            mom.norm_sq() - p.mass * p.mass,
            u,
        ]);
    }
    Ok(t)
}

fn phase(ctx: &Ctx<'_>) -> Result<ResultTable, RunError> {
    let (a, b) = ctx.particles()?;
    let ph = &ctx.cfg.phase;
    let e2 = ctx.cfg.coupling.e2;
    let opts = PhaseOptions {
        speed_floor: ph.speed_floor,
        include_charge_signs: ph.charge_signs,
    };
    let rec = ctx.wrap(phase_record(&a, &b, ph.t, ph.t_ref, ph.zeta, ph.kappa, &opts))?;
    let residual = ctx.wrap(kernel_consistency_residual(&a.momentum(), &b.momentum()))?;
    let mut t = ctx.table(&[
        "t",
        "t_ref",
        "log_factor",
        "relative_speed",
        "kernel",
        "two_particle_coefficient",
        "consistency_residual",
        "asymptotic_phase",
        "zeta",
        "kappa",
        "finite_phase",
    ]);
    t.push(vec![
        ph.t,
        ph.t_ref,
        rec.log_factor,
        rec.relative_speed,
        rec.kernel,
        rec.two_particle_coefficient,
        residual,
        rec.asymptotic_phase(e2),
        rec.zeta,
        rec.kappa,
        e2 * rec.zeta,
    ]);
    Ok(t)
}

fn soft(ctx: &Ctx<'_>) -> Result<ResultTable, RunError> {
    let (a, b) = ctx.particles()?;
    let (dv1, dv2) = ctx.cfg.dressing_velocities();
    let br = ctx.wrap(soft_breakdown(&a, &b, &dv1, &dv2, &ctx.cfg.quadrature))?;
    let mut t = ctx.table(&[
        "lambda",
        "c_D",
        "c_C_cross",
        "c_C_self_1",
        "c_C_self_2",
        "c_G_1",
        "c_G_2",
        "c_F",
        "D",
        "C",
        "G1",
        "G2",
        "F",
    ]);
    for &lambda in &ctx.cfg.regulators.lambda_list {
        let reg = ctx.wrap(Regulators::new(lambda, ctx.cfg.regulators.delta))?;
        let x = ctx.wrap(exponent_at(&br, &reg, ctx.cfg.coupling.e2))?;
        t.push(vec![
            lambda,
            br.c_d,
            br.c_c_cross,
            br.c_c_self_1,
            br.c_c_self_2,
            br.c_g_1,
            br.c_g_2,
            br.c_f,
            x.d,
            x.c,
            x.g1,
            x.g2,
            x.f,
        ]);
    }
    Ok(t)
}

fn scan(ctx: &Ctx<'_>) -> Result<ResultTable, RunError> {
    let (a, b) = ctx.particles()?;
    let (dv1, dv2) = ctx.cfg.dressing_velocities();
    let setup = ScanSetup {
        p1: &a,
        p2: &b,
        dressing_v1: &dv1,
        dressing_v2: &dv2,
        quad: &ctx.cfg.quadrature,
        delta: ctx.cfg.regulators.delta,
        e2: ctx.cfg.coupling.e2,
    };
    let rows = ctx.wrap(regulator_scan(
        &setup,
        &ctx.cfg.regulators.lambda_list,
        ctx.cfg.run.workers,
    ))?;
    let mut t = ctx.table(&["lambda", "expD", "expC", "expF"]);
    for r in rows {
        t.push(vec![r.lambda, r.exp_d, r.exp_c, r.exp_f]);
    }
    Ok(t)
}

fn cancel(ctx: &Ctx<'_>) -> Result<ResultTable, RunError> {
    let (a, b) = ctx.particles()?;
    let base1 = Vec3::from(ctx.cfg.dressing.dv1.unwrap_or(ctx.cfg.particles.v1));
    let (_, dv2) = ctx.cfg.dressing_velocities();
    let deltas: Vec<f64> = match ctx.cfg.dressing.offshell {
        d if d > 0.0 => vec![0.0, d],
        _ => CANCEL_SWEEP.to_vec(),
    };
    let rule = ctx.wrap(ctx.cfg.quadrature.build())?;
    let mut t = ctx.table(&["delta", "c_D", "c_C", "c_G_1", "c_G_2", "c_F", "null_projection_max"]);
    for d in deltas {
        let dv1 = perturb_speed(&base1, d);
        ctx.wrap(crate::kinematics::check_velocity(&dv1))?;
        let br = ctx.wrap(crate::soft_integrals::soft_breakdown_with(&a, &b, &dv1, &dv2, &rule))?;
        let null = null_projection_max(&a, &b, &dv1, &dv2, &rule);
        t.push(vec![d, br.c_d, br.c_c(), br.c_g_1, br.c_g_2, br.c_f, null]);
    }
    Ok(t)
}

fn cloud(ctx: &Ctx<'_>) -> Result<ResultTable, RunError> {
    let (a, b) = ctx.particles()?;
    let spec = ctx.wrap(CloudSpec::new(vec![a, b], 0.0, ctx.cfg.coupling.e2))?;
    let slope = ctx.wrap(cloud_log_coefficient(&spec, &ctx.cfg.quadrature))?;
    let mut t = ctx.table(&["lambda", "log_coefficient", "n_expected", "vacuum_overlap"]);
    for &lambda in &ctx.cfg.regulators.lambda_list {
        let reg = ctx.wrap(Regulators::new(lambda, ctx.cfg.regulators.delta))?;
        let n = slope * reg.log_ratio();
        t.push(vec![lambda, slope, n, ctx.wrap(vacuum_overlap(n))?]);
    }
    Ok(t)
}

fn fock(ctx: &Ctx<'_>) -> Result<ResultTable, RunError> {
    let f = &ctx.cfg.fock;
    let alphas: Vec<Complex64> = f.alphas.iter().map(|a| Complex64::new(a[0], a[1])).collect();
    let state = ctx.wrap(fock_displacement_sim(&alphas, f.n_max, f.leakage_bound))?;
    let total: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
    let mut t = ctx.table(&[
        "mode",
        "alpha_re",
        "alpha_im",
        "mean_occupation",
        "expected_occupation",
        "vacuum_overlap",
        "expected_vacuum_overlap",
        "leakage",
    ]);
    for (m, a) in alphas.iter().enumerate() {
        t.push(vec![
            m as f64,
            a.re,
            a.im,
            state.mean_occupation(m),
            a.norm_sqr(),
            state.vacuum_overlap(),
            (-total / 2.0).exp(),
            state.leakage(),
        ]);
    }
    Ok(t)
}

fn entangle(ctx: &Ctx<'_>) -> Result<ResultTable, RunError> {
    let (a, b) = ctx.particles()?;
    let (dv1, dv2) = ctx.cfg.dressing_velocities();
    let br = ctx.wrap(soft_breakdown(&a, &b, &dv1, &dv2, &ctx.cfg.quadrature))?;
    let lambda = ctx.cfg.regulators.lambda_list[0];
    let reg = ctx.wrap(Regulators::new(lambda, ctx.cfg.regulators.delta))?;
    let f = ctx.wrap(exponent_at(&br, &reg, ctx.cfg.coupling.e2))?.f;

    let amp = ctx.cfg.state_amplitude()?;
    let rho4 = ctx.wrap(density_from_amplitude(&amp, 0.0))?;
    let rho = ctx.wrap(reduce_particle1(&rho4))?;
    let rho_d = ctx.wrap(rho.scaled((2.0 * f).exp()))?;
    let s_trace = entropy_trace(&rho, EntropyConvention::SignedTrace);
    let s_standard = entropy_trace(&rho, EntropyConvention::Standard);
    let sd_direct = entropy_trace(&rho_d, EntropyConvention::SignedTrace);
    let sd_identity = (2.0 * f).exp() * (s_trace + 2.0 * f * rho.trace());
    let residual = ctx.wrap(dressed_entropy_identity_check(&rho, f))?;
    if residual > ENTROPY_IDENTITY_TOL {
        return Err(RunError::Module {
            subcommand: ctx.sub.name(),
            source: Error::Contract(format!("dressed entropy identity residual {residual:.3e}")),
        });
    }

    let bare = ctx.wrap(rho.normalized())?;
    let s_bare = entropy_trace(&bare, EntropyConvention::SignedTrace);
    let sd_bare = ctx.wrap(dressed_entropy(
        s_bare,
        f,
        bare.trace(),
        NormalizationMode::BareNormalized,
    ))?;
    let dn = ctx.wrap(rho.scaled(1.0 / rho_d.trace()))?;
    let s_dn = entropy_trace(&dn, EntropyConvention::SignedTrace);
    let sd_dressed = ctx.wrap(dressed_entropy(
        s_dn,
        f,
        dn.trace(),
        NormalizationMode::DressedNormalized,
    ))?;

    let s_norm = ctx.wrap(normalized_entanglement(&rho4, f))?;
    let purity = ctx.wrap(rho.purity())?;
    let mut t = ctx.table(&[
        "F",
        "trace_rho",
        "S_trace",
        "S_standard",
        "Sd_direct",
        "Sd_identity",
        "identity_residual",
        "Sd_bare_normalized",
        "Sd_dressed_normalized",
        "S_normalized",
        "purity",
    ]);
    t.push(vec![
        f,
        rho.trace(),
        s_trace,
        s_standard,
        sd_direct,
        sd_identity,
        residual,
        sd_bare,
        sd_dressed,
        s_norm,
        purity,
    ]);
    Ok(t)
}
