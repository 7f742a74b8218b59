use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use dmac_core::analysis::{
    self, spectrum::MAX_SPECTRUM_VERTICES, CollisionKind, CollisionReport,
};
use dmac_core::kat::run_kat;
use dmac_core::mac::symbols_from_bytes;
use dmac_core::{dmac, dmac_blocks, girth_formula, keygen, verify_bytes, MacKey, MacParams, Tag};
use rand::rngs::{OsRng, StdRng};
use rand::{RngCore, SeedableRng};
use toml::{Table, Value};

use crate::{Analysis, Command, Keying, Profile};

/// `Ok(false)` means the command ran but a check failed (exit 1).
pub fn run(command: Command) -> Result<bool> {
    match command {
        Command::Keygen {
            profile,
            password_length,
            out,
        } => cmd_keygen(&profile, password_length, out.as_deref()),
        Command::Mac {
            profile,
            key,
            input,
            blocks,
            out,
        } => cmd_mac(&profile, &key, &input, blocks.as_deref(), out.as_deref()),
        Command::Verify {
            profile,
            key,
            input,
            tag,
        } => cmd_verify(&profile, &key, &input, &tag),
        Command::Analyze { what } => cmd_analyze(what),
        Command::Bench {
            profile,
            keying,
            bytes,
        } => cmd_bench(&profile, &keying, bytes),
        Command::Kat { file } => cmd_kat(&file),
    }
}

fn load_params(profile: &Profile) -> Result<MacParams> {
    let mut params = match &profile.params {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading parameters from {}", path.display()))?;
            MacParams::from_toml(&text)?
        }
        None => MacParams::default_profile(),
    };
    if let Some(v) = profile.variant {
        params = params.with_variant(v);
    }
    if let Some(e) = profile.encoding {
        params = params.with_encoding(e);
    }
    if let Some(p) = profile.padding {
        params = params.with_padding(p);
    }
    if let Some(t) = profile.tag_mode {
        params = params.with_tag_mode(t);
    }
    Ok(params)
}

fn load_key(path: &Path, params: &MacParams) -> Result<MacKey> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading key from {}", path.display()))?;
    let key = MacKey::from_toml(&text)?;
    key.validate(params)?;
    Ok(key)
}

fn make_rng(seed: Option<u64>) -> StdRng {
    match seed {
        Some(s) => StdRng::seed_from_u64(s),
        None => StdRng::from_entropy(),
    }
}

fn obtain_key(keying: &Keying, params: &MacParams, rng: &mut dyn RngCore) -> Result<MacKey> {
    match &keying.key {
        Some(path) => load_key(path, params),
        None => Ok(keygen(params, keying.password_length, rng)?),
    }
}

fn read_input(input: &str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    if input == "-" {
        io::stdin()
            .read_to_end(&mut buf)
            .context("reading standard input")?;
    } else {
        buf = fs::read(input).with_context(|| format!("reading {input}"))?;
    }
    Ok(buf)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_report(out: Option<&Path>, report: &Table) -> Result<()> {
    write_output(out, &toml::to_string(report)?)
}

fn int(v: usize) -> Value {
    Value::Integer(v as i64)
}

fn cmd_keygen(profile: &Profile, password_length: usize, out: Option<&Path>) -> Result<bool> {
    let params = load_params(profile)?;
    let bound = params.max_password_len();
    eprintln!(
        "password length bound: s <= g(D({},Q))/2 = {bound}",
        params.n()
    );
    let key = keygen(&params, password_length, &mut OsRng)?;
    let text = key.to_toml();
    match out {
        Some(path) => {
            write_private(path, &text)?;
            eprintln!("key written to {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(true)
}

#[cfg(unix)]
fn write_private(path: &Path, text: &str) -> Result<()> {
    use std::os::unix::fs::OpenOptionsExt;
    let mut f = fs::OpenOptions::new()
        .write(true)
        .create(true)
        .truncate(true)
        .mode(0o600)
        .open(path)
        .with_context(|| format!("creating {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(not(unix))]
fn write_private(path: &Path, text: &str) -> Result<()> {
    write_output(Some(path), text)
}

fn cmd_mac(
    profile: &Profile,
    key: &Path,
    input: &str,
    blocks: Option<&[u64]>,
    out: Option<&Path>,
) -> Result<bool> {
    let params = load_params(profile)?;
    let key = load_key(key, &params)?;
    let tag = match blocks {
        Some(b) => dmac_blocks(b, &key, &params)?,
        None => {
            let message = read_input(input)?;
            dmac(&symbols_from_bytes(&message, &params)?, &key, &params)?
        }
    };
    write_output(out, &format!("{tag}\n"))?;
    Ok(true)
}

fn cmd_verify(profile: &Profile, key: &Path, input: &str, tag: &str) -> Result<bool> {
    let params = load_params(profile)?;
    let key = load_key(key, &params)?;
    let candidate = Tag::parse(tag, params.tag_bits())?;
    let message = read_input(input)?;
    let ok = verify_bytes(&message, &key, &params, &candidate)?;
    eprintln!("{}", if ok { "tag OK" } else { "tag MISMATCH" });
    Ok(ok)
}

fn cmd_analyze(what: Analysis) -> Result<bool> {
    match what {
        Analysis::Graph { n, q, out } => analyze_graph(n, q, out.as_deref()),
        Analysis::Avalanche {
            profile,
            keying,
            trials,
            message_bits,
            out,
        } => {
            let params = load_params(&profile)?;
            let mut rng = make_rng(keying.seed);
            let key = obtain_key(&keying, &params, &mut rng)?;
            let r = analysis::avalanche(&params, &key, trials, message_bits, &mut rng)?;
            let holds = r.within(4.0);
            let h = params.tag_bits() as f64;
            eprintln!(
                "avalanche ({}): mean {:.3} bits, std {:.3}, band {} +/- {}: {}",
                params.variant(),
                r.mean,
                r.std_dev,
                h / 2.0,
                2.0 * h.sqrt(),
                verdict(holds)
            );
            let mut t = Table::new();
            t.insert("variant".into(), params.variant().to_string().into());
            t.insert("trials".into(), int(r.trials));
            t.insert("tag_bits".into(), int(r.tag_bits));
            t.insert("mean_hamming".into(), r.mean.into());
            t.insert("std_hamming".into(), r.std_dev.into());
            t.insert("pass".into(), holds.into());
            emit_report(out.as_deref(), &t)?;
            Ok(holds)
        }
        Analysis::Bits {
            profile,
            keying,
            trials,
            emit_bits,
            out,
        } => {
            let params = load_params(&profile)?;
            let mut rng = make_rng(keying.seed);
            let key = obtain_key(&keying, &params, &mut rng)?;
            let tags = trials.unwrap_or_else(|| 1_000_000usize.div_ceil(params.tag_bits()));
            let r = analysis::bit_statistics(&params, &key, tags, &mut rng)?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(path) = emit_bits {
                fs::write(&path, analysis::pack_bits(&r.bitstream))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let s = &r.stream;
            eprintln!(
                "{} bits: monobit z = {:.4} ({}), 2-bit chi2 = {:.4} ({})",
                s.bits,
                s.monobit_z,
                verdict(s.monobit_pass),
                s.serial_chi2,
                verdict(s.serial_pass)
            );
            let mut t = Table::new();
            t.insert("tags".into(), int(r.tags));
            t.insert("bits".into(), int(s.bits));
            t.insert("ones".into(), int(s.ones));
            t.insert("monobit_z".into(), s.monobit_z.into());
            t.insert("monobit_pass".into(), s.monobit_pass.into());
            t.insert(
                "pair_counts".into(),
                Value::Array(s.pair_counts.iter().map(|&c| int(c)).collect()),
            );
            t.insert("serial_chi2".into(), s.serial_chi2.into());
            t.insert("serial_pass".into(), s.serial_pass.into());
            t.insert(
                "warnings".into(),
                Value::Array(r.warnings.iter().cloned().map(Value::from).collect()),
            );
            emit_report(out.as_deref(), &t)?;
            Ok(s.passed())
        }
        Analysis::Collisions {
            n,
            q,
            max_blocks,
            variant,
            keying,
            out,
        } => {
            if q < 2 {
                bail!("Q = {q} is below 2");
            }
            let block_bits = q.ilog2();
            let params = MacParams::new(1 << block_bits, block_bits, n, q, n * block_bits as usize)?
                .with_variant(variant);
            let mut rng = make_rng(keying.seed);
            let key = obtain_key(&keying, &params, &mut rng)?;
            let r = analysis::brute_force_collisions(&params, &key, max_blocks)?;
            let holds = r.structural_below_half_girth() == 0;
            eprintln!(
                "{} messages of up to {max_blocks} blocks, key IV {} with s = {}",
                r.searched,
                key.iv(),
                key.password().len()
            );
            emit_report(out.as_deref(), &collision_table(&r))?;
            for kind in KINDS {
                eprintln!("  {:<13} {}", kind_name(kind), r.count(kind));
            }
            eprintln!(
                "structural collisions below half girth {}: {} ({})",
                r.half_girth,
                r.structural_below_half_girth(),
                verdict(holds)
            );
            Ok(holds)
        }
    }
}

const KINDS: [CollisionKind; 5] = [
    CollisionKind::Encoding,
    CollisionKind::Mirror,
    CollisionKind::Backtracking,
    CollisionKind::TagReduction,
    CollisionKind::Structural,
];

fn kind_name(kind: CollisionKind) -> &'static str {
    match kind {
        CollisionKind::Encoding => "encoding",
        CollisionKind::Mirror => "mirror",
        CollisionKind::Backtracking => "backtracking",
        CollisionKind::TagReduction => "tag-reduction",
        CollisionKind::Structural => "structural",
    }
}

fn collision_table(r: &CollisionReport) -> Table {
    let mut t = Table::new();
    t.insert("searched".into(), int(r.searched));
    t.insert("half_girth".into(), int(r.half_girth));
    let mut counts = Table::new();
    for kind in KINDS {
        counts.insert(kind_name(kind).into(), int(r.count(kind)));
    }
    t.insert("counts".into(), counts.into());
    t.insert(
        "structural_below_half_girth".into(),
        int(r.structural_below_half_girth()),
    );
    let pairs = r
        .pairs
        .iter()
        .map(|p| {
            let mut e = Table::new();
            e.insert("kind".into(), kind_name(p.kind).into());
            e.insert("first".into(), symbols(&p.first));
            e.insert("second".into(), symbols(&p.second));
            e.insert("walk_len".into(), int(p.walk_len));
            Value::Table(e)
        })
        .collect();
    t.insert("pair".into(), Value::Array(pairs));
    t
}

fn symbols(s: &[u64]) -> Value {
    Value::Array(s.iter().map(|&x| Value::Integer(x as i64)).collect())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn analyze_graph(n: usize, q: u64, out: Option<&Path>) -> Result<bool> {
    let oracle = analysis::build_oracle(n, q)?;
    let s = analysis::structure_checks(&oracle);
    let girth = analysis::measure_girth(&oracle);
    let floor = girth_formula(n)?;
    let girth_ok = girth.is_none_or(|g| g >= floor);
    let holds = s.regular && s.symmetric && s.bipartite && girth_ok;

    let mut t = Table::new();
    t.insert("n".into(), int(n));
    t.insert("q".into(), Value::Integer(q as i64));
    t.insert("vertices".into(), int(s.vertices));
    t.insert("edges".into(), int(s.edges));
    t.insert("regular".into(), s.regular.into());
    t.insert("bipartite".into(), s.bipartite.into());
    t.insert("symmetric".into(), s.symmetric.into());
    t.insert("components".into(), int(s.components));
    t.insert(
        "girth".into(),
        girth.map_or_else(|| "infinite".into(), int),
    );
    t.insert("girth_formula".into(), int(floor));

    eprintln!(
        "D({n},{q}): {} vertices, {} edges, degree {}..{}, bipartite {}, {} component(s)",
        s.vertices, s.edges, s.min_degree, s.max_degree, s.bipartite, s.components
    );
    eprintln!(
        "girth {} (formula floor {floor}): {}",
        girth.map_or_else(|| "infinite".to_string(), |g| g.to_string()),
        verdict(girth_ok)
    );

    if s.vertices <= MAX_SPECTRUM_VERTICES {
        let sp = analysis::spectrum(&oracle)?;
        let mut st = Table::new();
        st.insert("lambda0".into(), sp.top.into());
        if let Some(l1) = sp.second {
            st.insert("lambda1".into(), l1.into());
        }
        st.insert("bound".into(), sp.bound.into());
        st.insert("within_bound".into(), sp.within_bound().into());
        st.insert("symmetric".into(), sp.symmetric().into());
        st.insert("max_residual".into(), sp.max_residual.into());
        t.insert("spectrum".into(), st.into());
        eprintln!(
            "lambda0 = {:.6}, lambda1 = {}, 2 sqrt(q) = {:.6}{}",
            sp.top,
            sp.second.map_or_else(|| "none".into(), |l| format!("{l:.6}")),
            sp.bound,
            if sp.within_bound() { "" } else { " (bound exceeded; reported, not asserted)" }
        );
    }
    emit_report(out, &t)?;
    Ok(holds)
}

fn cmd_bench(profile: &Profile, keying: &Keying, bytes: usize) -> Result<bool> {
    let params = load_params(profile)?;
    let mut rng = make_rng(keying.seed);
    let key = obtain_key(keying, &params, &mut rng)?;
    let mut message = vec![0u8; bytes];
    rng.fill_bytes(&mut message);
    let symbols = symbols_from_bytes(&message, &params)?;

    let start = Instant::now();
    let tag = dmac(&symbols, &key, &params)?;
    let secs = start.elapsed().as_secs_f64();
    let ops = analysis::count_ops(&symbols, &key, &params)?;

    let mut t = Table::new();
    t.insert("variant".into(), params.variant().to_string().into());
    t.insert("bytes".into(), int(bytes));
    t.insert("seconds".into(), secs.into());
    t.insert("bytes_per_second".into(), (bytes as f64 / secs).into());
    t.insert("blocks".into(), int(ops.blocks));
    t.insert("password_length".into(), int(ops.password_len));
    t.insert("measured_ops".into(), Value::Integer(ops.measured as i64));
    t.insert("predicted_ops".into(), Value::Integer(ops.predicted as i64));
    if let (Some(m), Some(f)) = (ops.measured_per_bit(), ops.formula_per_bit()) {
        t.insert("measured_ops_per_bit".into(), m.into());
        t.insert("formula_ops_per_bit".into(), f.into());
        t.insert(
            "correction_factor".into(),
            (1.0 + ops.password_len as f64 / ops.blocks as f64).into(),
        );
    }
    t.insert("tag".into(), tag.to_string().into());
    emit_report(None, &t)?;
    eprintln!(
        "{:.2} MiB/s; {} field operations ({} predicted)",
        bytes as f64 / secs / (1 << 20) as f64,
        ops.measured,
        ops.predicted
    );
    Ok(ops.matches_formula())
}

fn cmd_kat(file: &Path) -> Result<bool> {
    let text =
        fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let outcomes = run_kat(&text)?;
    for o in &outcomes {
        println!("{o}");
    }
    Ok(outcomes.iter().all(|o| o.passed()))
}
