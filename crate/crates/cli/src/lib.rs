//! The `logcy2` command line: word algebra, surface operations, base
//! diagrams, collection counts and the worked demos.
//!
//! Exit codes: 0 success, 1 domain error (irregular step, invalid surface,
//! failed check), 2 usage error (bad flags, unparsable word or vector).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use rayon::prelude::*;

use logcy2::atf::{self, BaseDiagram};
use logcy2::birmap;
use logcy2::cy2::Cy2Error;
use logcy2::hmsbook;
use logcy2::{BirationalMap, LatticeVector, RatFunc2, Surface, Word};

pub mod fuzz;

const WORD_GRAMMAR: &str = "word grammar:
  word := term (\"*\" term)*          leftmost letter acts last
  term := atom (\"^\" int)?
  atom := E | E[a,b] | A[a,b;c,d] | P | r1 | r2 | r3 | id | ( word )";

#[derive(Parser, Debug)]
#[command(name = "logcy2", version, about = "Exact combinatorics of log Calabi-Yau surfaces and their birational maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Words in GL2(Z) and E
    #[command(subcommand)]
    Word(WordCmd),
    /// Surfaces with explicit toric models (JSON files)
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Almost-toric base diagrams
    #[command(subcommand)]
    Atf(AtfCmd),
    /// Exceptional collection and vanishing cycle bookkeeping
    #[command(subcommand)]
    Hms(HmsCmd),
    /// Worked examples
    #[command(subcommand)]
    Demo(DemoCmd),
    /// Relation checks
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
enum WordCmd {
    /// Whether two words realize the same birational map
    Equal { w1: String, w2: String },
    /// Canonical rational-function form of the map
    Realize { w: String },
    /// Volume character: 1 or -1
    Character { w: String },
    /// Tropicalization, or its value on a vector
    Trop {
        w: String,
        #[arg(long, allow_hyphen_values = true, value_name = "a,b")]
        vector: Option<String>,
    },
    /// Evaluates the map at a rational point
    Eval {
        w: String,
        #[arg(long, allow_hyphen_values = true, value_name = "p,q")]
        point: String,
    },
}

#[derive(Subcommand, Debug)]
enum SurfaceCmd {
    Validate { file: PathBuf },
    Invariants { file: PathBuf },
    Intersections { file: PathBuf },
    /// Pushes the surface forward along a word
    Pushforward { w: String, file: PathBuf },
    /// Blows up until every letter of the word is regular
    Resolve { w: String, file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum AtfCmd {
    /// Base diagram of a surface
    Diagram {
        file: PathBuf,
        #[arg(long, value_name = "out.svg")]
        svg: Option<PathBuf>,
    },
    /// Applies the move mirror to E_n to a diagram (or a surface's diagram)
    Move {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_name = "a,b")]
        elementary: String,
        /// apply the move mirror to E_n^-1 instead
        #[arg(long)]
        inverse: bool,
        #[arg(long, value_name = "out.svg")]
        svg: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum HmsCmd {
    /// Count-level checks
    Counts { file: PathBuf },
    /// Both collections as JSON
    Collections { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum DemoCmd {
    /// The three reflections of the cubic surface
    Cubic,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// P^5 = id, conjugation identities, character multiplicativity
    Relations {
        /// random pairs for the multiplicativity check
        #[arg(long, default_value_t = 32)]
        samples: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Cy2Error> for Failure {
    fn from(e: Cy2Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<atf::AtfError> for Failure {
    fn from(e: atf::AtfError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Word(c) => word_cmd(c, out),
        Command::Surface(c) => surface_cmd(c, out),
        Command::Atf(c) => atf_cmd(c, out),
        Command::Hms(c) => hms_cmd(c, out),
        Command::Demo(DemoCmd::Cubic) => {
            let report = cubic_demo();
            write!(out, "{}", report.text)?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Domain("cubic demo check failed".into()))
            }
        }
        Command::Verify(VerifyCmd::Relations { samples }) => {
            let seed = fuzz::seed_from_env().map_err(Failure::Usage)?;
            let checks = relation_checks(seed, samples);
            writeln!(out, "seed {seed}")?;
            for c in &checks {
                writeln!(out, "{} {}", if c.pass { "ok  " } else { "FAIL" }, c.name)?;
            }
            match checks.iter().filter(|c| !c.pass).count() {
                0 => Ok(()),
                n => Err(Failure::Domain(format!("{n} relation check(s) failed"))),
            }
        }
    }
}

fn parse_word(s: &str) -> Result<Word, Failure> {
    s.parse::<Word>().map_err(|e| Failure::Usage(format!("cannot parse word {s:?}: {e}\n{WORD_GRAMMAR}")))
}

fn parse_pair<T: std::str::FromStr>(s: &str, what: &str) -> Result<(T, T), Failure> {
    let bad = || Failure::Usage(format!("expected {what} as two comma-separated numbers, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_vector(s: &str) -> Result<LatticeVector, Failure> {
    let (a, b) = parse_pair::<i64>(s, "a vector a,b")?;
    Ok(LatticeVector::new(a, b))
}

/// Exact `p/q` text, `q = 1` included.
pub fn ratio(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn load_surface(path: &Path) -> Result<Surface, Failure> {
    Ok(Surface::from_json(&read(path)?)?)
}

fn word_cmd(c: WordCmd, out: &mut dyn Write) -> Outcome {
    match c {
        WordCmd::Equal { w1, w2 } => {
            let (a, b) = (parse_word(&w1)?, parse_word(&w2)?);
            writeln!(out, "{}", birmap::equal(&a, &b))?;
        }
        WordCmd::Realize { w } => writeln!(out, "{}", parse_word(&w)?.realize())?,
        WordCmd::Character { w } => {
            let c = parse_word(&w)?.volume_character().map_err(|e| Failure::Domain(e.to_string()))?;
            writeln!(out, "{c}")?;
        }
        WordCmd::Trop { w, vector } => {
            let t = parse_word(&w)?.tropicalize();
            match vector {
                Some(s) => writeln!(out, "{}", t.apply(&parse_vector(&s)?))?,
                None => writeln!(out, "{t}")?,
            }
        }
        WordCmd::Eval { w, point } => {
            let word = parse_word(&w)?;
            let (x, y) = parse_pair::<BigRational>(&point, "a point p,q")?;
            let value = match word.evaluate(&x, &y) {
                Some(p) => p,
                None => word.realize().evaluate(&x, &y).map_err(|e| {
                    Failure::Domain(format!("map is undefined at ({}, {}): {e}", ratio(&x), ratio(&y)))
                })?,
            };
            writeln!(out, "({}, {})", ratio(&value.0), ratio(&value.1))?;
        }
    }
    Ok(())
}

fn surface_cmd(c: SurfaceCmd, out: &mut dyn Write) -> Outcome {
    match c {
        SurfaceCmd::Validate { file } => match Surface::from_json(&read(&file)?) {
            Ok(_) => writeln!(out, "valid")?,
            Err(Cy2Error::Invalid(vs)) => {
                for v in &vs {
                    writeln!(out, "violation: {v}")?;
                }
                return Err(Failure::Domain(format!("{} violation(s)", vs.len())));
            }
            Err(e) => return Err(e.into()),
        },
        SurfaceCmd::Invariants { file } => {
            let inv = load_surface(&file)?.numeric_invariants();
            writeln!(out, "{}", serde_json::to_string(&inv).expect("plain data"))?;
        }
        SurfaceCmd::Intersections { file } => {
            let r = load_surface(&file)?.boundary_intersection_matrix()?;
            let minors: Vec<String> = r.leading_minors.iter().map(|d| d.to_string()).collect();
            let doc = serde_json::json!({
                "matrix": r.matrix,
                "leading_minors": minors,
                "negative_definite": r.negative_definite,
                "remark_discrepancy": r.remark_discrepancy,
            });
            writeln!(out, "{doc}")?;
        }
        SurfaceCmd::Pushforward { w, file } => {
            let w = parse_word(&w)?;
            writeln!(out, "{}", load_surface(&file)?.pushforward(&w)?.to_json())?;
        }
        SurfaceCmd::Resolve { w, file } => {
            let w = parse_word(&w)?;
            writeln!(out, "{}", load_surface(&file)?.resolve(&w).to_json())?;
        }
    }
    Ok(())
}

fn load_diagram(path: &Path) -> Result<BaseDiagram, Failure> {
    let text = read(path)?;
    match BaseDiagram::from_json(&text) {
        Ok(d) => Ok(d),
        Err(de) => match Surface::from_json(&text) {
            Ok(s) => Ok(atf::diagram(&s)),
            Err(se) => Err(Failure::Domain(format!("{} is neither a diagram ({de}) nor a surface ({se})", path.display()))),
        },
    }
}

fn write_svg(d: &BaseDiagram, path: Option<PathBuf>) -> Outcome {
    if let Some(p) = path {
        std::fs::write(&p, d.render_svg()).map_err(|e| Failure::Domain(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn atf_cmd(c: AtfCmd, out: &mut dyn Write) -> Outcome {
    match c {
        AtfCmd::Diagram { file, svg } => {
            let d = atf::diagram(&load_surface(&file)?);
            writeln!(out, "{}", d.to_json())?;
            write_svg(&d, svg)
        }
        AtfCmd::Move { file, elementary, inverse, svg } => {
            let n = parse_vector(&elementary)?;
            if !n.is_primitive() {
                return Err(Failure::Usage(format!("{n} is not a primitive vector")));
            }
            let d = load_diagram(&file)?;
            let moved = if inverse { d.inverse_elementary_move(&n)? } else { d.elementary_move(&n)? };
            writeln!(out, "{}", moved.to_json())?;
            write_svg(&moved, svg)
        }
    }
}

fn hms_cmd(c: HmsCmd, out: &mut dyn Write) -> Outcome {
    match c {
        HmsCmd::Counts { file } => {
            let r = hmsbook::check_counts(&load_surface(&file)?);
            writeln!(out, "{}", serde_json::to_string(&r).expect("plain data"))?;
            if !r.pass {
                return Err(Failure::Domain("count check failed".into()));
            }
        }
        HmsCmd::Collections { file } => writeln!(out, "{}", hmsbook::to_json(&load_surface(&file)?))?,
    }
    Ok(())
}

/// Output of `demo cubic`.
pub struct CubicReport {
    pub text: String,
    pub pass: bool,
    /// alternating words checked, and how many of them equal the identity
    pub alternating: (usize, usize),
}

/// The fixed formulas of the three reflections of the cubic.
pub fn reflection_formulas() -> [(&'static str, &'static str, &'static str); 3] {
    [("r1", "(1+y)^2/x", "y"), ("r2", "x", "(1+x)^2/y"), ("r3", "x/(x+y)^2", "y/(x+y)^2")]
}

/// Words in `{r1, r2, r3}` of length `1..=max_len` with no letter repeated
/// twice in a row, shortest first, lexicographic within a length.
pub fn alternating_words(max_len: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| (1..=3).filter(move |&i| w.last() != Some(&i)).map(move |i| [w.as_slice(), &[i]].concat()))
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

pub fn cubic_demo() -> CubicReport {
    use std::fmt::Write as _;
    let mut text = String::new();
    let mut pass = true;
    let cubic = Surface::cubic();
    let _ = writeln!(text, "cubic surface {}", cubic.to_json());
    let id = Word::identity();
    let r: Vec<Word> = ["r1", "r2", "r3"].iter().map(|n| Word::named(n).expect("macro")).collect();
    for (w, (name, f, g)) in r.iter().zip(reflection_formulas()) {
        let expected = BirationalMap { f: f.parse::<RatFunc2>().expect("formula"), g: g.parse().expect("formula") };
        let map = w.realize();
        let matches = map == expected;
        let involution = birmap::equal(&w.pow(2), &id);
        let resolved = cubic.resolve(w);
        let pushed = resolved.pushforward(w);
        let regular = pushed.is_ok();
        pass &= matches && involution && regular;
        let _ = writeln!(text, "{name} = {w}");
        let _ = writeln!(text, "  map {map}");
        let _ = writeln!(text, "  matches ({f}, {g}): {matches}");
        let _ = writeln!(text, "  {name}^2 = id: {involution}");
        let _ = writeln!(text, "  resolved {}", resolved.to_json());
        match pushed {
            Ok(p) => {
                let _ = writeln!(text, "  pushforward {}", p.to_json());
            }
            Err(e) => {
                let _ = writeln!(text, "  pushforward failed: {e}");
            }
        }
    }
    let words = alternating_words(6);
    let trivial: Vec<String> = words
        .par_iter()
        .filter_map(|idx| {
            let w = idx.iter().fold(Word::identity(), |acc, &i| &acc * &r[i - 1]);
            birmap::equal(&w, &id).then(|| idx.iter().map(|i| format!("r{i}")).collect::<Vec<_>>().join("*"))
        })
        .collect();
    let _ = writeln!(text, "alternating words of length <= 6: {} checked, {} equal to id", words.len(), trivial.len());
    for t in &trivial {
        let _ = writeln!(text, "  trivial: {t}");
    }
    pass &= trivial.is_empty();
    CubicReport { text, pass, alternating: (words.len(), trivial.len()) }
}

/// One named pass/fail check.
pub struct Check {
    pub name: String,
    pub pass: bool,
}

/// The relation suite behind `verify relations`; checks are independent and
/// reported in a fixed order.
pub fn relation_checks(seed: u64, samples: usize) -> Vec<Check> {
    let w = |s: &str| s.parse::<Word>().expect("fixed word");
    let id = Word::identity();
    let mut fixed: Vec<(String, Word, Word)> = vec![("P^5 = id".into(), w("P^5"), id.clone())];
    for k in 1..5 {
        fixed.push((format!("P^{k} != id"), w(&format!("P^{k}")), id.clone()));
    }
    fixed.push((
        "A[-1,0;0,1] * E * A[-1,0;0,1] = A[1,1;0,1] * E".into(),
        w("A[-1,0;0,1] * E * A[-1,0;0,1]"),
        w("A[1,1;0,1] * E"),
    ));
    // SL2 letters permute the elementary transformations: A·E_n·A⁻¹ = E_{Aᵀn}
    for a in ["A[0,-1;1,0]", "A[1,1;0,1]", "A[0,1;-1,-1]"] {
        let m = w(a).letters()[0].tropicalize();
        for n in fuzz::small_rays() {
            let t = m.apply(&n);
            fixed.push((
                format!("{a} * E[{},{}] * {a}^-1 = E[{},{}]", n.x, n.y, t.x, t.y),
                w(&format!("{a} * E[{},{}] * {a}^-1", n.x, n.y)),
                w(&format!("E[{},{}]", t.x, t.y)),
            ));
        }
    }
    for name in ["r1", "r2", "r3"] {
        fixed.push((format!("{name}^2 = id"), w(name).pow(2), id.clone()));
    }
    let mut checks: Vec<Check> = fixed
        .par_iter()
        .map(|(name, a, b)| {
            let expect_equal = !name.contains("!=");
            Check { name: name.clone(), pass: birmap::equal(a, b) == expect_equal }
        })
        .collect();

    let mut rng = fuzz::rng(seed);
    let pairs: Vec<(Word, Word)> = (0..samples).map(|_| (fuzz::random_word(&mut rng, 3), fuzz::random_word(&mut rng, 3))).collect();
    let bad: Vec<String> = pairs
        .par_iter()
        .filter_map(|(u, v)| {
            let chi = |x: &Word| x.volume_character();
            let ok = match (chi(u), chi(v), chi(&(u * v))) {
                (Ok(a), Ok(b), Ok(c)) => a * b == c && c == (u * v).det(),
                _ => false,
            };
            (!ok).then(|| format!("({u}) * ({v})"))
        })
        .collect();
    checks.push(Check {
        name: format!("character is multiplicative on {samples} random pairs{}", failures(&bad)),
        pass: bad.is_empty(),
    });
    checks
}

fn failures(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!(" (fails on {})", bad.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_word_counts() {
        let all = alternating_words(6);
        assert_eq!(all.len(), 3 + 6 + 12 + 24 + 48 + 96);
        assert!(all.iter().all(|w| w.windows(2).all(|p| p[0] != p[1])));
        assert_eq!(&all[..4], &[vec![1], vec![2], vec![3], vec![1, 2]]);
    }

    #[test]
    fn pairs_and_ratios() {
        assert_eq!(parse_vector("-2, 3").unwrap(), LatticeVector::new(-2, 3));
        assert!(matches!(parse_vector("1"), Err(Failure::Usage(_))));
        let (p, q) = parse_pair::<BigRational>("-4/6,5", "a point").unwrap();
        assert_eq!((ratio(&p), ratio(&q)), ("-2/3".to_string(), "5/1".to_string()));
    }

    #[test]
    fn relation_suite_passes() {
        let checks = relation_checks(3, 4);
        assert!(checks.len() > 20);
        assert!(checks.iter().all(|c| c.pass), "{:?}", checks.iter().filter(|c| !c.pass).map(|c| &c.name).collect::<Vec<_>>());
    }
}
