mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use staircase::air::{
    self, gn_reach, required_snr_hd, write_air_csv, write_reach_csv, GmiEstimator, LinkParams, ReachRow,
};
use staircase::modem::{Constellation, NoiseVariance};
use staircase::scc::CodeId;
use staircase::sim::{self, write_csv_file, BerRecord, DecoderSpec, GridCell, Manifest};

use config::{default_out_dir, parse_list, parse_list_or_range, parse_noise, ConfigError, ExperimentArgs};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CENSORED: u8 = 3;

/// Staircase-code BER experiments and AIR/reach analysis.
///
/// Settings are resolved as built-in defaults, then `--config FILE`
/// (flat TOML), then flags.
#[derive(Debug, Parser)]
#[command(name = "staircase", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an SNR sweep and write CSV results plus a JSON manifest.
    Simulate {
        #[command(flatten)]
        args: ExperimentArgs,
        /// Rerun every experiment recorded in a manifest instead.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Base name of the output files.
        #[arg(long, default_value = "simulate")]
        name: String,
    },
    /// Grid search over marking thresholds or L − K at one SNR.
    Optimize {
        #[command(flatten)]
        args: ExperimentArgs,
        /// Threshold pairs "d1,d2;d1,d2;…".
        #[arg(long)]
        thresholds: Option<String>,
        /// One-threshold values, list or start:stop:step.
        #[arg(long)]
        delta3_line: Option<String>,
        /// L − K values, list or start:stop:step.
        #[arg(long)]
        lk_line: Option<String>,
        #[arg(long, default_value = "optimize")]
        name: String,
    },
    /// HD and GMI achievable rates and the SNR each code rate needs.
    Air {
        /// PAM orders, comma separated.
        #[arg(long, default_value = "2,8")]
        pam: String,
        #[arg(long, default_value = "-5:30:0.25", allow_hyphen_values = true)]
        snr_range: String,
        #[arg(long, default_value = "full-n0")]
        noise: String,
        /// Gauss–Hermite nodes for the GMI.
        #[arg(long, default_value_t = air::DEFAULT_GH_NODES)]
        nodes: usize,
        /// Simulation manifests whose required SNRs are compared with the
        /// HD-AIR prediction.
        #[arg(long = "gap-from")]
        gap_from: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optical reach for required SNRs under the GN model.
    Reach {
        #[arg(long, default_value = "C1")]
        code: String,
        #[arg(long, default_value_t = 8)]
        pam: usize,
        /// "decoder=snr_db,…", e.g. "standard=19.8,isabm=18.9".
        #[arg(long)]
        required: Option<String>,
        /// Read required SNRs from simulation manifests.
        #[arg(long = "from")]
        from: Vec<PathBuf>,
        /// TOML file overriding link parameters.
        #[arg(long)]
        link: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quick internal consistency checks.
    Selftest,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<staircase::Error> for Failure {
    fn from(e: staircase::Error) -> Self {
        match e {
            staircase::Error::InvalidParameter(_) | staircase::Error::LengthMismatch { .. } => {
                Failure::Config(e.to_string())
            }
            other => Failure::Run(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { args, manifest, name } => simulate(&args, manifest.as_deref(), &name),
        Command::Optimize { args, thresholds, delta3_line, lk_line, name } => {
            optimize(&args, thresholds.as_deref(), delta3_line.as_deref(), lk_line.as_deref(), &name)
        }
        Command::Air { pam, snr_range, noise, nodes, gap_from, out } => {
            air_cmd(&pam, &snr_range, &noise, nodes, &gap_from, out)
        }
        Command::Reach { code, pam, required, from, link, out } => {
            reach_cmd(&code, pam, required.as_deref(), &from, link.as_deref(), out)
        }
        Command::Selftest => selftest(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("every record is censored: the error target was not reached");
            ExitCode::from(EXIT_CENSORED)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn write_outputs(out: &Path, name: &str, manifest: &Manifest) -> Result<(), Failure> {
    fs::create_dir_all(out)?;
    let csv = out.join(format!("{name}.csv"));
    write_csv_file(&csv, &manifest.rows())?;
    let json = out.join(format!("{name}.json"));
    manifest.write(&json)?;
    eprintln!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

fn print_record(spec: &sim::ExperimentSpec, r: &BerRecord) {
    let cell = match spec.decoder {
        DecoderSpec::Standard => "standard".to_string(),
        DecoderSpec::Isabm { k, mode } => format!("isabm L-K={} {mode:?}", spec.window - k),
    };
    println!(
        "{} M={} {cell} snr={:.3} dB  pre={:.3e} post={:.3e}  errors={} bits={}{}",
        spec.code,
        spec.pam_order,
        r.snr_db,
        r.pre_fec_ber,
        r.post_fec_ber,
        r.bit_errors,
        r.info_bits,
        if r.censored { " (censored)" } else { "" }
    );
}

fn simulate(args: &ExperimentArgs, manifest: Option<&Path>, name: &str) -> Outcome {
    let (result, out) = match manifest {
        Some(path) => {
            let m = Manifest::read(path)?;
            let out = args.out.clone().unwrap_or_else(default_out_dir);
            (m.rerun()?, out)
        }
        None => {
            let r = args.resolve("isabm")?;
            if r.spec.snr_db.is_empty() {
                return Err(Failure::Config("no SNR points given (use --snr or --snr-range)".into()));
            }
            let sweep = sim::sweep(&r.spec, r.target_ber)?;
            let mut m = Manifest::new();
            m.push_sweep(&r.spec, &sweep);
            (m, r.out)
        }
    };
    for e in &result.experiments {
        for rec in &e.records {
            print_record(&e.spec, rec);
        }
        match e.required_snr_db {
            Some(s) => println!("required SNR at BER {:.0e}: {s:.3} dB", e.target_ber),
            None => println!("required SNR at BER {:.0e}: not bracketed", e.target_ber),
        }
    }
    write_outputs(&out, name, &result)?;
    Ok(result.experiments.iter().flat_map(|e| &e.records).any(|r| !r.censored))
}

fn grid_cells(
    thresholds: Option<&str>,
    delta3_line: Option<&str>,
    lk_line: Option<&str>,
    window: usize,
) -> Result<Vec<GridCell>, Failure> {
    let mut cells = Vec::new();
    if let Some(t) = thresholds {
        for pair in t.split(';').filter(|p| !p.trim().is_empty()) {
            match parse_list(pair)?[..] {
                [delta1, delta2] => cells.push(GridCell::Thresholds { delta1, delta2 }),
                _ => return Err(Failure::Config(format!("threshold cell {pair:?} is not \"d1,d2\""))),
            }
        }
    }
    if let Some(l) = delta3_line {
        cells.extend(parse_list_or_range(l)?.into_iter().map(|delta3| GridCell::Delta3 { delta3 }));
    }
    if let Some(l) = lk_line {
        for v in parse_list_or_range(l)? {
            let marked = v as usize;
            if marked as f64 != v {
                return Err(Failure::Config(format!("L − K = {v} is not an integer")));
            }
            if marked < 2 || marked > window {
                eprintln!("skipping L − K = {marked}: needs 2 ≤ L − K ≤ L = {window}");
                continue;
            }
            cells.push(GridCell::MarkedBlocks { marked });
        }
    }
    if cells.is_empty() {
        return Err(Failure::Config("no grid cells (use --thresholds, --delta3-line or --lk-line)".into()));
    }
    Ok(cells)
}

fn optimize(
    args: &ExperimentArgs,
    thresholds: Option<&str>,
    delta3_line: Option<&str>,
    lk_line: Option<&str>,
    name: &str,
) -> Outcome {
    let r = args.resolve("isabm")?;
    if !matches!(r.spec.decoder, DecoderSpec::Isabm { .. }) {
        return Err(Failure::Config("optimize needs --decoder isabm".into()));
    }
    let [snr] = r.spec.snr_db[..] else {
        return Err(Failure::Config("optimize runs at exactly one SNR".into()));
    };
    let cells = grid_cells(thresholds, delta3_line, lk_line, r.spec.window)?;
    let table = sim::grid_search(&r.spec, snr, &cells)?;
    for row in &table.rows {
        print_record(&row.spec, &row.record);
    }
    match table.argmin {
        Some(i) => println!("argmin: {:?} post-FEC BER {:.3e}", table.rows[i].cell, table.rows[i].record.post_fec_ber),
        None => println!("argmin: none (all cells censored)"),
    }
    let mut m = Manifest::new();
    m.push_grid(&table, r.target_ber);
    write_outputs(&r.out, name, &m)?;
    Ok(table.argmin.is_some())
}

fn parse_pams(s: &str) -> Result<Vec<Constellation>, Failure> {
    s.split(',')
        .map(|t| {
            let order: usize = t.trim().parse().map_err(|_| Failure::Config(format!("bad PAM order {t:?}")))?;
            Ok(Constellation::from_order(order)?)
        })
        .collect()
}

fn air_cmd(pam: &str, snr_range: &str, noise: &str, nodes: usize, gap_from: &[PathBuf], out: Option<PathBuf>) -> Outcome {
    let variance = parse_noise(noise)?;
    let snrs = parse_list_or_range(snr_range)?;
    let out = out.unwrap_or_else(default_out_dir);
    fs::create_dir_all(&out)?;
    let est = GmiEstimator::GaussHermite { nodes };
    let mut needed = vec!["code,M,rate,I_SCC,required_snr_hd_db".to_string()];
    for cons in parse_pams(pam)? {
        let curve = air::air_curve(&cons, &snrs, variance, est)?;
        let path = out.join(format!("air_pam{}.csv", cons.order()));
        write_air_csv(fs::File::create(&path)?, &curve)?;
        eprintln!("wrote {}", path.display());
        for code in [CodeId::C1, CodeId::C2, CodeId::C3] {
            let rate = air::scc_rate(code)?;
            let i_scc = air::scc_rate_bits(code, cons.bits_per_symbol())?;
            match required_snr_hd(&cons, rate, variance) {
                Ok(s) => {
                    println!("{code} M={} R={rate:.4} I_SCC={i_scc:.3}: HD-AIR needs {s:.3} dB", cons.order());
                    needed.push(format!("{code},{},{rate},{i_scc},{s}", cons.order()));
                }
                Err(e) => {
                    println!("{code} M={}: {e}", cons.order());
                    needed.push(format!("{code},{},{rate},{i_scc},", cons.order()));
                }
            }
        }
    }
    fs::write(out.join("air_required.csv"), needed.join("\n") + "\n")?;

    if !gap_from.is_empty() {
        let mut rows = vec!["code,M,decoder,required_snr_db,hd_air_snr_db,gap_db".to_string()];
        for path in gap_from {
            let m = Manifest::read(path)?;
            for e in &m.experiments {
                let cons = Constellation::from_order(e.spec.pam_order)?;
                let rate = air::scc_rate(e.spec.code)?;
                let name = e.spec.decoder.name();
                match (e.required_snr_db, required_snr_hd(&cons, rate, e.spec.noise)) {
                    (Some(sim), Ok(hd)) => {
                        println!("gap {} M={} {name}: {sim:.3} − {hd:.3} = {:.3} dB", e.spec.code, e.spec.pam_order, sim - hd);
                        rows.push(format!("{},{},{name},{sim},{hd},{}", e.spec.code, e.spec.pam_order, sim - hd));
                    }
                    (None, _) => println!("gap {} M={} {name}: required SNR not bracketed", e.spec.code, e.spec.pam_order),
                    (_, Err(err)) => println!("gap {} M={} {name}: {err}", e.spec.code, e.spec.pam_order),
                }
            }
        }
        fs::write(out.join("gap.csv"), rows.join("\n") + "\n")?;
    }
    Ok(true)
}

fn reach_cmd(
    code: &str,
    pam: usize,
    required: Option<&str>,
    from: &[PathBuf],
    link: Option<&Path>,
    out: Option<PathBuf>,
) -> Outcome {
    let link = match link {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            toml::from_str::<LinkParams>(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?
        }
        None => LinkParams::default(),
    };
    link.validate()?;
    let mut inputs: Vec<(CodeId, usize, String, f64)> = Vec::new();
    if let Some(list) = required {
        let code: CodeId = code.parse()?;
        for item in list.split(',').filter(|s| !s.trim().is_empty()) {
            let (dec, snr) = item
                .split_once('=')
                .ok_or_else(|| Failure::Config(format!("{item:?} is not decoder=snr_db")))?;
            let snr: f64 = snr.trim().parse().map_err(|_| Failure::Config(format!("bad SNR in {item:?}")))?;
            inputs.push((code, pam, dec.trim().to_string(), snr));
        }
    }
    for path in from {
        for e in &Manifest::read(path)?.experiments {
            if let Some(s) = e.required_snr_db {
                inputs.push((e.spec.code, e.spec.pam_order, e.spec.decoder.name().to_string(), s));
            }
        }
    }
    if inputs.is_empty() {
        return Err(Failure::Config("no required SNRs (use --required or --from)".into()));
    }
    let mut rows = Vec::new();
    for (code, order, decoder, snr) in &inputs {
        let m = Constellation::from_order(*order)?.bits_per_symbol();
        let rate = air::scc_rate(*code)?;
        match gn_reach(&link, *snr) {
            Ok(r) => {
                let r = r.with_rate(m, rate);
                println!(
                    "{code} M={order} {decoder}: {snr:.3} dB → {} spans, {:.0} km ({:.0} km continuous) at {:.1} Gb/s",
                    r.max_spans,
                    r.reach_km,
                    r.reach_km_continuous,
                    r.data_rate_gbps.unwrap_or(0.0)
                );
                rows.push(ReachRow {
                    code: *code,
                    pam_order: *order,
                    decoder: decoder.clone(),
                    required_snr_db: *snr,
                    reach_km: r.reach_km,
                    rate_gbps: air::data_rate_gbps(m, rate),
                });
            }
            Err(e) => println!("{code} M={order} {decoder}: {e}"),
        }
    }
    for base in rows.iter().filter(|r| r.decoder == "standard") {
        for other in rows.iter().filter(|r| r.decoder != "standard" && r.code == base.code && r.pam_order == base.pam_order) {
            println!(
                "{} M={} {} vs standard: +{:.0} km ({:+.1}%)",
                other.code,
                other.pam_order,
                other.decoder,
                other.reach_km - base.reach_km,
                100.0 * (other.reach_km / base.reach_km - 1.0)
            );
        }
    }
    let out = out.unwrap_or_else(default_out_dir);
    fs::create_dir_all(&out)?;
    let path = out.join("reach.csv");
    write_reach_csv(fs::File::create(&path)?, &rows)?;
    eprintln!("wrote {}", path.display());
    Ok(true)
}

fn selftest() -> Outcome {
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        println!("{} {name}", if pass { "ok  " } else { "FAIL" });
        ok &= pass;
    };
    for (code, n, k) in [(CodeId::C1, 256, 239), (CodeId::C2, 256, 231), (CodeId::C3, 256, 223)] {
        let c = code.build()?;
        check(&format!("{code} is ({n},{k})"), c.nc() == n && c.kc() == k);
    }
    let c = CodeId::C2.build()?;
    let info: Vec<bool> = (0..c.kc()).map(|i| i % 3 == 0).collect();
    let cw = c.encode(&info)?;
    let mut r = cw.clone();
    for p in [3, 100, 250] {
        r[p] = !r[p];
    }
    let fixed = matches!(c.bdd_decode_bits(&r)?, staircase::BddOutcome::Decoded { codeword, .. } if codeword == staircase::word::from_bits(&cw));
    check("C2 corrects three errors", fixed);
    let mut spec = sim::ExperimentSpec::new(CodeId::C1, 2, DecoderSpec::Standard);
    spec.noiseless = true;
    spec.stop = sim::StopRule::new(1, 14_208 * 30);
    let rec = sim::run_point(&spec, 0.0)?;
    check("noiseless stream decodes without errors", rec.bit_errors == 0 && rec.censored);
    check("HD AIR limits", air::hd_air(0.0, 3)? == 12.0 && air::hd_air(0.5, 3)? == 0.0);
    let two = Constellation::pam(1)?;
    let pt = air::air_point(&two, 5.0, NoiseVariance::FullN0, GmiEstimator::default())?;
    check("GMI above HD AIR", pt.i_gmi >= pt.i_hd);
    let reach = gn_reach(&LinkParams::default(), 15.0)?;
    check("GN reach finite", reach.max_spans >= 1);
    if ok {
        Ok(true)
    } else {
        Err(Failure::Run("selftest failed".into()))
    }
}
