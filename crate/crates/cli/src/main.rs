//! `eyefold` command-line tool.

use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eyefold::annotation::AnnotationWorkspace;
use eyefold::blend::{
    generate_candidates, load_templates, path_interpolate, regional_interpolate, sharpen_crease, SharpenParams,
};
use eyefold::mesh::{load_obj, load_topology, mirror_mesh, save_obj};
use eyefold::metric::{error_cdf, group_errors, hoodedness_profile, shape_errors_by_id, DEFAULT_PROFILE_SAMPLES};
use eyefold::pipeline::{run_batch_pipeline, PipelineConfig};
use eyefold::stats::{
    diversity_report, gmm_fit, gmm_sample, matrix_to_profiles, profile_stats, profiles_to_matrix, Gmm,
};
use eyefold::synth::{gen_annotated_scans, gen_templates};
use eyefold::tables;
use eyefold_service::ServiceConfig;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "eyefold", version, about = "Eyelid-fold consistency toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write three procedural eyelid templates, a topology descriptor and a manifest.
    GenTemplates {
        #[arg(long)]
        out: PathBuf,
        /// Grid columns per eye (at least 8).
        #[arg(long, default_value_t = 16)]
        resolution: usize,
    },
    /// Write jittered synthetic scans with random annotations.
    GenScans {
        #[arg(long)]
        templates: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Write evenly spaced interpolations along the template path.
    Candidates {
        #[arg(long)]
        templates: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
    /// Interpolate the templates; regional when --u-inner or --u-outer is given.
    Interp {
        #[arg(long)]
        templates: PathBuf,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        u_inner: Option<f64>,
        #[arg(long)]
        u_outer: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sharpen the crease of a mesh.
    Sharpen {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, default_value_t = 0.0)]
        strength: f64,
        /// Degrees in [-90, 90].
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        orientation: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reflect a mesh across the mirror plane.
    Mirror {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hoodedness profiles of one or more meshes as CSV.
    Profile {
        #[arg(long, required = true, num_args = 1..)]
        mesh: Vec<PathBuf>,
        #[arg(long)]
        topology: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PROFILE_SAMPLES)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shape error of each profile in --a against the same mesh id in --b.
    Error {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Empirical CDF of an error table.
    Cdf {
        #[arg(long)]
        errors: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean error per metadata group.
    GroupErrors {
        #[arg(long)]
        errors: PathBuf,
        #[arg(long)]
        metadata: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a diagonal GMM to profile vectors.
    GmmFit {
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long, default_value_t = 3)]
        components: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw profiles from a fitted GMM.
    GmmSample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-t mean and standard deviation of a profile set.
    ProfileStats {
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the spread of two profile sets.
    Diversity {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Retopologize every annotated scan and profile the results.
    Pipeline {
        #[arg(long)]
        templates: PathBuf,
        #[arg(long)]
        scans: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PROFILE_SAMPLES)]
        k: usize,
        #[arg(long)]
        mirror_augment: bool,
    },
    /// Run the annotation HTTP service.
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
struct MeshArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    topology: PathBuf,
}

#[derive(Args, Debug)]
struct ServeArgs {
    /// Directory holding templates.json, scans.json and annotations.ndjson.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long)]
    scans: Option<PathBuf>,
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Export directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1")]
    listen: IpAddr,
    #[arg(long, default_value_t = 8080)]
    port: u16,
}

struct Failure {
    kind: String,
    message: String,
}

impl From<eyefold::Error> for Failure {
    fn from(e: eyefold::Error) -> Self {
        Failure {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            kind: "IoError".into(),
            message: e.to_string(),
        }
    }
}

fn usage(message: String) -> Failure {
    Failure {
        kind: "UsageError".into(),
        message,
    }
}

fn written(paths: &[&Path]) -> Value {
    json!({ "written": paths })
}

fn run(command: Command) -> Result<Value, Failure> {
    match command {
        Command::GenTemplates { out, resolution } => {
            let g = gen_templates(&out, resolution)?;
            Ok(json!({ "manifest": g.manifest, "topology": g.topology, "meshes": g.meshes }))
        }
        Command::GenScans {
            templates,
            out,
            count,
            seed,
        } => {
            let d = gen_annotated_scans(&out, &templates, count, seed)?;
            Ok(json!({ "scans": d.scan_manifest, "annotations": d.annotation_log, "count": count }))
        }
        Command::Candidates { templates, out, n } => {
            let (set, _) = load_templates(&templates)?;
            let mut paths = Vec::new();
            for mesh in generate_candidates(&set, n)? {
                let path = out.join(format!("{}.obj", mesh.name));
                save_obj(&mesh, &path)?;
                paths.push(path);
            }
            Ok(json!({ "written": paths }))
        }
        Command::Interp {
            templates,
            u,
            u_inner,
            u_outer,
            out,
        } => {
            let (set, topo) = load_templates(&templates)?;
            let mesh = if u_inner.is_none() && u_outer.is_none() {
                path_interpolate(&set, u)?
            } else {
                regional_interpolate(&set, &topo, u, u_inner.unwrap_or(u), u_outer.unwrap_or(u))?
            };
            save_obj(&mesh, &out)?;
            Ok(written(&[&out]))
        }
        Command::Sharpen {
            mesh,
            strength,
            orientation,
            out,
        } => {
            let topo = load_topology(&mesh.topology)?;
            let sharpened = sharpen_crease(
                &load_obj(&mesh.mesh)?,
                &topo,
                SharpenParams::new(strength, orientation)?,
            )?;
            save_obj(&sharpened, &out)?;
            Ok(written(&[&out]))
        }
        Command::Mirror { mesh, out } => {
            let topo = load_topology(&mesh.topology)?;
            save_obj(&mirror_mesh(&load_obj(&mesh.mesh)?, &topo)?, &out)?;
            Ok(written(&[&out]))
        }
        Command::Profile { mesh, topology, k, out } => {
            let topo = load_topology(&topology)?;
            let profiles = mesh
                .iter()
                .map(|p| hoodedness_profile(&load_obj(p)?, &topo, k))
                .collect::<eyefold::Result<Vec<_>>>()?;
            tables::write_profiles(&out, &profiles)?;
            Ok(json!({ "written": [out], "profiles": profiles.len(), "k": k }))
        }
        Command::Error { a, b, out } => {
            let errors = shape_errors_by_id(&tables::read_profiles(&a)?, &tables::read_profiles(&b)?)?;
            tables::write_errors(&out, &errors)?;
            Ok(written(&[&out]))
        }
        Command::Cdf { errors, out } => {
            let values: Vec<f64> = tables::read_errors(&errors)?.into_values().collect();
            tables::write_cdf(&out, &error_cdf(&values)?)?;
            Ok(written(&[&out]))
        }
        Command::GroupErrors { errors, metadata, out } => {
            let groups = group_errors(&tables::read_errors(&errors)?, &tables::read_metadata(&metadata)?)?;
            tables::write_groups(&out, &groups)?;
            Ok(written(&[&out]))
        }
        Command::GmmFit {
            profiles,
            components,
            seed,
            out,
        } => {
            let data = profiles_to_matrix(&tables::read_profiles(&profiles)?)?;
            let fit = gmm_fit(&data, components, seed)?;
            fit.model.save(&out)?;
            Ok(json!({
                "written": [out],
                "iterations": fit.iterations(),
                "converged": fit.converged,
                "log_likelihood": fit.log_likelihood_trace.last(),
            }))
        }
        Command::GmmSample { model, n, seed, out } => {
            let samples = gmm_sample(&Gmm::load(&model)?, n, seed)?;
            tables::write_profiles(&out, &matrix_to_profiles(&samples, "sample_")?)?;
            Ok(written(&[&out]))
        }
        Command::ProfileStats { profiles, out } => {
            tables::write_stats(&out, &profile_stats(&tables::read_profiles(&profiles)?)?)?;
            Ok(written(&[&out]))
        }
        Command::Diversity { a, b, out } => {
            let sa = profile_stats(&tables::read_profiles(&a)?)?;
            let sb = profile_stats(&tables::read_profiles(&b)?)?;
            let report = diversity_report(&sa, &sb)?;
            tables::write_diversity(&out, &report)?;
            Ok(json!({ "written": [out], "b_wider_everywhere": report.b_wider_everywhere }))
        }
        Command::Pipeline {
            templates,
            scans,
            annotations,
            out,
            k,
            mirror_augment,
        } => {
            let mut config = PipelineConfig::new(templates, scans, annotations, &out);
            config.k = k;
            config.mirror_augment = mirror_augment;
            let manifest = run_batch_pipeline(&config)?;
            Ok(json!({ "manifest": out.join(eyefold::pipeline::PIPELINE_MANIFEST), "outputs": manifest.outputs.len() }))
        }
        Command::Serve(args) => serve(args),
    }
}

fn serve(args: ServeArgs) -> Result<Value, Failure> {
    let mut config = match &args.data {
        Some(dir) => ServiceConfig::from_data_dir(dir),
        None => match (&args.templates, &args.scans, &args.annotations) {
            (Some(t), Some(s), Some(a)) => ServiceConfig {
                templates: t.clone(),
                scans: s.clone(),
                annotations: a.clone(),
                export_dir: PathBuf::from("exports"),
            },
            _ => {
                return Err(usage(
                    "serve needs --data or all of --templates, --scans, --annotations".into(),
                ))
            }
        },
    };
    if let Some(t) = args.templates {
        config.templates = t;
    }
    if let Some(s) = args.scans {
        config.scans = s;
    }
    if let Some(a) = args.annotations {
        config.annotations = a;
    }
    if let Some(o) = args.out {
        config.export_dir = o;
    }
    let workspace: AnnotationWorkspace = config.open()?;
    let addr = SocketAddr::new(args.listen, args.port);
    eyefold_service::serve_blocking(workspace, addr)?;
    Ok(json!({ "stopped": addr.to_string() }))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let message = rendered
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(str::trim)
                .collect::<Vec<_>>()
                .join(" ");
            return fail(usage(message.trim_start_matches("error: ").to_string()));
        }
    };
    match run(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => fail(f),
    }
}

fn fail(f: Failure) -> ExitCode {
    eprintln!("{}", json!({ "error": f.message, "kind": f.kind }));
    ExitCode::FAILURE
}
