mod report;

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use report::{num, opt, Report};
use setrap::depth::{intrinsic_depth, optimal_condition, special_saddle};
use setrap::effpot::{optimize_bias, ueff_contours, BiasSearchOptions};
use setrap::fourier::transform_grid;
use setrap::multipole::{
    compare_3d, electrode_layout, field_p, physical_potential_p, q_parameter, strength, MultipoleSpec,
};
use setrap::ring::{ring_depth, ring_strength, ring_sweep, RingDepthOptions, RingDesign};
use setrap::surface_field::{Geometry, Shape, Vec3};
use setrap::units::{scale_factors, TrapConfig, ELEMENTARY_CHARGE};
use setrap::{Complex64, Error, TrapParams};

const UM: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "setrap", version, about = "Surface-electrode ion trap design and analysis")]
struct Cli {
    /// Trap parameter file (JSON, lab units); defaults to the built-in reference trap.
    #[arg(short = 'c', long = "config", global = true)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Scaling constants q0 and U0 for the trap parameters.
    Params,
    /// Fields of an electrode geometry file.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Surface spectra of polygon electrodes.
    #[command(subcommand)]
    Fourier(FourierCmd),
    /// Single-ring point trap.
    #[command(subcommand)]
    Ring(RingCmd),
    /// Equidistant n-strip multipole guides.
    #[command(subcommand)]
    Multipole(MultipoleCmd),
}

#[derive(Subcommand)]
enum FieldCmd {
    /// Potential and field at points `x,y,z` (µm).
    Eval {
        #[arg(short, long)]
        geometry: PathBuf,
        #[arg(long = "at", required = true, value_parser = parse_triple)]
        at: Vec<[f64; 3]>,
    },
}

#[derive(Subcommand)]
enum FourierCmd {
    /// Transform of one polygon region on a rectangular k grid (k in 1/µm).
    Grid {
        #[arg(short, long)]
        geometry: PathBuf,
        /// Index of the polygon region in the geometry file.
        #[arg(long, default_value_t = 0)]
        region: usize,
        #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
        kx_min: f64,
        #[arg(long, default_value_t = 0.1)]
        kx_max: f64,
        #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
        ky_min: f64,
        #[arg(long, default_value_t = 0.1)]
        ky_max: f64,
        #[arg(long, default_value_t = 21)]
        nx: usize,
        #[arg(long, default_value_t = 21)]
        ny: usize,
    },
}

#[derive(Args)]
struct RingTheta {
    /// Ring parameter θ in (0, π/6).
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long)]
    deg: bool,
}

#[derive(Subcommand)]
enum RingCmd {
    /// Radii, axial q and secular frequency.
    Design {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "r_outer_um")]
        theta: Option<f64>,
        /// Design from the outer radius instead of θ.
        #[arg(long, conflicts_with = "theta")]
        r_outer_um: Option<f64>,
        #[arg(long)]
        deg: bool,
    },
    /// Designs evenly spaced in θ.
    Sweep {
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Side of the planar search grid.
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Trap depth and escape saddle.
    Depth {
        #[command(flatten)]
        theta: RingTheta,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
}

#[derive(Args)]
struct Guide {
    #[arg(short, long)]
    n: u32,
    /// Angle of the first strip centre.
    #[arg(long, allow_hyphen_values = true)]
    theta0: f64,
    /// Angular strip width.
    #[arg(long)]
    theta_w: f64,
    #[arg(long)]
    deg: bool,
}

impl Guide {
    fn angles(&self) -> (f64, f64) {
        let s = if self.deg { PI / 180.0 } else { 1.0 };
        (self.theta0 * s, self.theta_w * s)
    }

    fn spec(&self, p: &TrapParams) -> setrap::Result<MultipoleSpec> {
        let (t0, tw) = self.angles();
        MultipoleSpec::with_params(self.n, t0, tw, p)
    }
}

#[derive(Subcommand)]
enum MultipoleCmd {
    /// Cylinder arcs and planar strip positions.
    Layout(Guide),
    /// Potential and field at plane coordinates `p = re,im` (µm).
    Field {
        #[command(flatten)]
        guide: Guide,
        #[arg(long = "at", required = true, value_parser = parse_pair, allow_hyphen_values = true)]
        at: Vec<[f64; 2]>,
    },
    /// Leading multipole coefficient.
    Strength(Guide),
    /// Intrinsic depth via the escape saddle.
    Depth(Guide),
    /// Special saddle ū_n and A_n for n = 2..=max_n.
    TableAn {
        #[arg(long, default_value_t = 10)]
        max_n: u32,
    },
    /// Optimal rf bias on the control electrode.
    BiasOpt {
        #[command(flatten)]
        guide: Guide,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 41)]
        coarse: usize,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        v_lo: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        v_hi: f64,
    },
    /// `U_eff/U0` over the cylinder disk for contour plots.
    UeffContours {
        #[command(flatten)]
        guide: Guide,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        vc: f64,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, default_value_t = 0.999)]
        max_radius: f64,
    },
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> =
        s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected {N} comma-separated numbers, got {s:?}"))
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_floats::<3>(s)
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    parse_floats::<2>(s)
}

fn mev(joule: f64) -> Value {
    num(joule / ELEMENTARY_CHARGE * 1e3)
}

fn cplx(z: Complex64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

fn run(cli: &Cli) -> setrap::Result<Report> {
    let params = match &cli.config {
        Some(path) => TrapConfig::load(path)?.into_params()?,
        None => TrapParams::reference(),
    };
    let d = params.ion_plane_distance;
    Ok(match &cli.command {
        Command::Params => {
            let s = scale_factors(&params)?;
            let c = params.to_config();
            Report::record(vec![
                ("rf_frequency_hz", num(c.rf_frequency_hz)),
                ("rf_voltage_v", num(c.rf_voltage_v)),
                ("ion_mass_amu", num(c.ion_mass_amu)),
                ("ion_charge_e", num(c.ion_charge_e)),
                ("height_um", num(c.height_um)),
                ("q0", num(s.q0)),
                ("u0_ev", num(s.u0_ev())),
                ("max_secular_hz", num(s.max_secular_frequency)),
            ])
        }
        Command::Field(FieldCmd::Eval { geometry, at }) => {
            let g = Geometry::load(geometry)?;
            let rows = at
                .iter()
                .map(|r| {
                    let s = g.sample(&Vec3::new(r[0] * UM, r[1] * UM, r[2] * UM))?;
                    Ok(vec![
                        num(r[0]),
                        num(r[1]),
                        num(r[2]),
                        num(s.potential),
                        num(s.field.x),
                        num(s.field.y),
                        num(s.field.z),
                    ])
                })
                .collect::<setrap::Result<_>>()?;
            Report::table(vec!["x_um", "y_um", "z_um", "potential_v", "ex_v_per_m", "ey_v_per_m", "ez_v_per_m"], rows)
        }
        Command::Fourier(FourierCmd::Grid { geometry, region, kx_min, kx_max, ky_min, ky_max, nx, ny }) => {
            let g = Geometry::load(geometry)?;
            let reg =
                g.regions.get(*region).ok_or_else(|| Error::Domain(format!("geometry has no region {region}")))?;
            if !matches!(reg.shape, Shape::Polygon { .. }) {
                return Err(Error::Unsupported(format!("region {region} is not a polygon")));
            }
            let rows = transform_grid(reg, (kx_min / UM, kx_max / UM), (ky_min / UM, ky_max / UM), *nx, *ny)?
                .into_iter()
                .map(|(k, v)| {
                    // V·m² → V·µm²
                    let v = v / (UM * UM);
                    vec![num(k.kx * UM), num(k.ky * UM), num(v.re), num(v.im)]
                })
                .collect();
            Report::table(vec!["kx_per_um", "ky_per_um", "re_v_um2", "im_v_um2"], rows)
        }
        Command::Ring(cmd) => ring(cmd, &params)?,
        Command::Multipole(cmd) => multipole(cmd, &params, d)?,
    })
}

fn ring(cmd: &RingCmd, params: &TrapParams) -> setrap::Result<Report> {
    let d = params.ion_plane_distance;
    let deg = |on: bool, x: f64| if on { x.to_radians() } else { x };
    Ok(match cmd {
        RingCmd::Design { theta, r_outer_um, deg: on } => {
            let design = match (theta, r_outer_um) {
                (Some(t), _) => RingDesign::new(deg(*on, *t), d)?,
                (None, Some(r)) => RingDesign::from_outer_radius(r * UM, d)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let s = ring_strength(design.theta, params)?;
            Report::record(vec![
                ("theta", num(design.theta)),
                ("r1_um", num(design.r_inner / UM)),
                ("r2_um", num(design.r_outer / UM)),
                ("qz", num(s.qz)),
                ("secular_hz", num(s.secular.frequency_hz)),
                ("beyond_adiabatic", Value::Bool(s.secular.beyond_adiabatic)),
            ])
        }
        RingCmd::Sweep { steps, grid } => {
            if *steps == 0 {
                return Err(Error::Domain("sweep needs at least one step".into()));
            }
            let opts = RingDepthOptions { grid: *grid, ..Default::default() };
            let rows = ring_sweep(*steps, params, opts)?
                .into_iter()
                .map(|r| {
                    vec![
                        num(r.theta),
                        num(r.r_inner / UM),
                        num(r.r_outer / UM),
                        num(r.qz),
                        num(r.secular_hz),
                        mev(r.depth),
                    ]
                })
                .collect();
            Report::table(vec!["theta", "R1_um", "R2_um", "qz", "secular_hz", "depth_mev"], rows)
        }
        RingCmd::Depth { theta, grid } => {
            let design = RingDesign::new(deg(theta.deg, theta.theta), d)?;
            let r = ring_depth(&design, params, RingDepthOptions { grid: *grid, ..Default::default() })?;
            Report::record(vec![
                ("theta", num(design.theta)),
                ("axial_saddle_um", num(r.axial_saddle_z / UM)),
                ("axial_depth_mev", mev(r.axial_depth)),
                (
                    "planar_saddle_um",
                    r.planar_saddle.map_or(Value::Null, |s| Value::Array(vec![num(s[0] / UM), num(s[1] / UM)])),
                ),
                ("planar_depth_mev", opt(r.planar_depth.map(|x| x / ELEMENTARY_CHARGE * 1e3))),
                ("depth_mev", num(r.depth_mev())),
                ("off_axis_escape", Value::Bool(r.off_axis_escape)),
            ])
        }
    })
}

fn multipole(cmd: &MultipoleCmd, params: &TrapParams, d: f64) -> setrap::Result<Report> {
    let u0 = scale_factors(params)?.u0;
    Ok(match cmd {
        MultipoleCmd::Layout(g) => {
            let spec = g.spec(params)?;
            let layout = electrode_layout(&spec)?;
            let rows = layout
                .strips
                .iter()
                .map(|s| {
                    let arc = layout.arcs[s.arc as usize];
                    vec![
                        json!(s.arc),
                        num(arc[0]),
                        num(arc[1]),
                        opt(s.y_lo.map(|y| y / UM)),
                        opt(s.y_hi.map(|y| y / UM)),
                    ]
                })
                .collect();
            Report::table(vec!["arc", "phi_plus", "phi_minus", "y_lo_um", "y_hi_um"], rows)
                .with_meta(vec![("warnings", json!(spec.warnings()))])
        }
        MultipoleCmd::Field { guide, at } => {
            let spec = guide.spec(params)?;
            let rows = at
                .iter()
                .map(|p| {
                    let z = Complex64::new(p[0] * UM, p[1] * UM);
                    let e = field_p(z, &spec)?;
                    Ok(vec![
                        num(p[0]),
                        num(p[1]),
                        num(physical_potential_p(z, &spec)?),
                        num(e.re),
                        num(e.im),
                        num(e.norm()),
                    ])
                })
                .collect::<setrap::Result<_>>()?;
            Report::table(vec!["p_re_um", "p_im_um", "potential_v", "ex_v_per_m", "ey_v_per_m", "e_abs_v_per_m"], rows)
        }
        MultipoleCmd::Strength(g) => {
            let spec = g.spec(params)?;
            let a = strength(&spec);
            let c = compare_3d(&spec);
            Report::record(vec![
                ("n", json!(spec.n)),
                ("alpha", cplx(a)),
                ("alpha_abs", num(a.norm())),
                ("alpha_max", num(c.alpha_se_max)),
                ("ratio_3d", num(c.ratio)),
                ("ratio_3d_max", num(c.ratio_max)),
                ("q", opt(q_parameter(&spec, params).ok())),
            ])
        }
        MultipoleCmd::Depth(g) => {
            let (t0, tw) = g.angles();
            let r = intrinsic_depth(g.n, t0, tw, params)?;
            let oc = optimal_condition(g.n, t0, tw)?;
            let estimates = r
                .saddle
                .estimate_chain
                .iter()
                .zip(&r.estimate_depths)
                .map(|(u, e)| json!({"u": cplx(*u), "depth_mev": mev(*e)}))
                .collect();
            Report::record(vec![
                ("u_saddle", cplx(r.saddle.u_saddle)),
                ("p_saddle_um", cplx(r.saddle.p_saddle_over_d * (d / UM))),
                ("depth_mev", mev(r.depth)),
                ("crude_mev", mev(r.crude)),
                ("estimates", Value::Array(estimates)),
                (
                    "optimal",
                    json!({"lhs": num(oc.lhs), "rhs": num(oc.rhs), "satisfied": oc.satisfied,
                           "saddle_is_special": oc.saddle_is_special}),
                ),
            ])
        }
        MultipoleCmd::TableAn { max_n } => {
            if *max_n < 2 {
                return Err(Error::Domain("table starts at n = 2".into()));
            }
            let rows = (2..=*max_n)
                .map(|n| {
                    let s = special_saddle(n)?;
                    Ok(vec![json!(n), num(s.u_bar), num(-s.u_bar / n as f64), num(s.a_n)])
                })
                .collect::<setrap::Result<_>>()?;
            Report::table(vec!["n", "u_bar", "minus_u_bar_over_n", "a_n"], rows)
        }
        MultipoleCmd::BiasOpt { guide, grid, coarse, v_lo, v_hi } => {
            let spec = guide.spec(params)?;
            let opts =
                BiasSearchOptions { grid: *grid, coarse: *coarse, v_lo: *v_lo, v_hi: *v_hi, ..Default::default() };
            let o = optimize_bias(&spec, params, opts)?;
            Report::record(vec![
                ("vc_opt", num(o.v_c_opt)),
                ("depth_ratio", num(o.depth_ratio)),
                ("depth_over_max_quadrupole", num(o.depth_over_max_quadrupole)),
                ("depth_mev", mev(o.optimum.depth_over_u0 * u0)),
                ("intrinsic_depth_mev", mev(o.intrinsic.depth_over_u0 * u0)),
                ("a_over_q2", opt(o.a_over_q2)),
                ("bias_voltage_v", num(o.bias_voltage_v)),
                ("q", opt(o.stability.map(|s| s.q))),
                ("stable", o.stability.map_or(Value::Null, |s| Value::Bool(s.stable))),
            ])
        }
        MultipoleCmd::UeffContours { guide, vc, grid, max_radius } => {
            let spec = guide.spec(params)?;
            let rows = ueff_contours(&spec, *vc, *grid, *max_radius)?
                .into_iter()
                .map(|r| vec![num(r[0]), num(r[1]), num(r[2])])
                .collect();
            Report::table(vec!["c_re", "c_im", "ueff_over_u0"], rows).with_meta(vec![("vc", num(*vc))])
        }
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        // unreadable or malformed input files are usage errors
        Error::Io(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            if e.kind() == ErrorKind::InvalidSubcommand {
                eprintln!("\n{}", Cli::command().render_help());
            }
            return ExitCode::from(code);
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
