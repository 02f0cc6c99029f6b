use std::io::Write;

use halfline::determinants::{DeterminantReport, DeterminantValue, ReportPolicy, SectionPolicy};
use halfline::euler2d::{self, CaseLabel, PipelinePolicy};
use halfline::json::{self, format_sig17};
use halfline::rootfind::{self, Bracket, ContourCount, ContourPolicy, Rectangle, RootResult};
use halfline::spectral::{self, band_distance, Mat2, SpectralFrame};
use halfline::{
    contfrac, jost, ContFracPolicy, Error, ProblemModel, ProblemSpec, TruncationPolicy,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::parse::Axis;
use crate::{io_error, CliError, Tolerances};

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Reads `--problem`: inline JSON, or `@path` for a file.
pub fn load_problem(arg: &str) -> CliResult<ProblemModel> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read problem file {path}: {e}")))?,
        None => arg.to_string(),
    };
    Ok(ProblemSpec::from_json(&text)?.build()?)
}

impl Tolerances {
    fn jost(&self) -> TruncationPolicy {
        TruncationPolicy {
            tol: self.tol,
            ..TruncationPolicy::default()
        }
    }

    fn sections(&self) -> TruncationPolicy {
        TruncationPolicy {
            tol: self.section_tol,
            ..TruncationPolicy::sections()
        }
    }

    fn report(&self) -> ReportPolicy {
        ReportPolicy {
            jost: self.jost(),
            sections: SectionPolicy(self.sections()),
            contfrac: ContFracPolicy::default(),
        }
    }

    fn contour(&self) -> ContourPolicy {
        ContourPolicy {
            margin: self.margin,
            ..ContourPolicy::default()
        }
    }
}

type MatJson = [[json::JsonComplex; 2]; 2];

fn mat(m: &Mat2) -> MatJson {
    m.0.map(|row| row.map(json::JsonComplex::from))
}

#[derive(Serialize)]
struct FrameOut {
    #[serde(serialize_with = "json::complex")]
    lambda: Complex64,
    #[serde(serialize_with = "json::complex")]
    mu_plus: Complex64,
    #[serde(serialize_with = "json::complex")]
    mu_minus: Complex64,
    #[serde(serialize_with = "json::complex")]
    mu_product: Complex64,
    #[serde(serialize_with = "json::sig17")]
    band_distance: f64,
    a: MatJson,
    p_plus: MatJson,
    p_minus: MatJson,
    q_plus: MatJson,
    q_minus: MatJson,
    r_plus: MatJson,
    r_minus: MatJson,
}

pub fn frame(lambda: Complex64, band_tol: f64) -> CliResult<String> {
    let f = spectral::spectral_frame(lambda, band_tol)?;
    let out = FrameOut {
        lambda: f.lambda,
        mu_plus: f.mu_plus,
        mu_minus: f.mu_minus,
        mu_product: f.mu_plus * f.mu_minus,
        band_distance: f.band_distance,
        a: mat(&f.a),
        p_plus: mat(&f.p_plus),
        p_minus: mat(&f.p_minus),
        q_plus: mat(&f.q_plus),
        q_minus: mat(&f.q_minus),
        r_plus: mat(&f.r_plus),
        r_minus: mat(&f.r_minus),
    };
    to_json(&out)
}

#[derive(Serialize)]
struct SectionDetails {
    #[serde(rename = "det_K")]
    det_k: DeterminantValue,
    #[serde(rename = "det_T")]
    det_t: DeterminantValue,
    jost_support: usize,
}

#[derive(Serialize)]
struct DetsAll<'a> {
    #[serde(flatten)]
    report: &'a DeterminantReport,
    sections: SectionDetails,
}

pub fn dets(
    model: &ProblemModel,
    lambda: Complex64,
    all: bool,
    tol: &Tolerances,
) -> CliResult<String> {
    let frame = SpectralFrame::new(lambda)?;
    let report = DeterminantReport::compute(model, &frame, &tol.report())?;
    if all {
        to_json(&DetsAll {
            report: &report,
            sections: SectionDetails {
                det_k: report.det_k_info,
                det_t: report.det_t_info,
                jost_support: report.jost_support,
            },
        })
    } else {
        to_json(&report)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Function {
    Jost,
    Evans,
    DetK,
    DetT,
    ContFrac,
}

fn characteristic<'a>(
    function: Function,
    model: &'a ProblemModel,
    tol: &'a Tolerances,
) -> impl Fn(Complex64) -> halfline::Result<Complex64> + Sync + 'a {
    let jp = tol.jost();
    let sp = tol.sections();
    let cp = ContFracPolicy::default();
    move |lambda| {
        let frame = SpectralFrame::new(lambda)?;
        match function {
            Function::Jost => jost::jost_function(model, &frame, &jp),
            Function::Evans => jost::evans(model, &frame, &jp),
            Function::DetK => {
                Ok(halfline::det_adaptive(model, &frame, &sp, halfline::Section::K)?.value)
            }
            Function::DetT => {
                Ok(halfline::det_adaptive(model, &frame, &sp, halfline::Section::T)?.value)
            }
            Function::ContFrac => contfrac::cont_frac_function(model, &frame, &cp, &jp),
        }
    }
}

#[derive(Serialize)]
struct EigsOut {
    function: Function,
    contour: ContourCount,
    roots: Vec<RootResult>,
    /// Zeros counted by the contour but not located.
    unresolved: i64,
}

pub fn eigs(
    model: &ProblemModel,
    re: (f64, f64),
    im: (f64, f64),
    function: Function,
    grid: usize,
    tol: &Tolerances,
) -> CliResult<String> {
    let rect = Rectangle::new(re, im)?;
    let f = characteristic(function, model, tol);
    let contour = rootfind::winding_number(&f, rect, &tol.contour())?;
    let mut roots = Vec::new();
    if model.is_real() && im.0 < 0.0 && im.1 > 0.0 {
        let real = |x: f64| f(Complex64::new(x, 0.0));
        let brackets: Vec<Bracket> = rootfind::bracket_real_roots(real, re.0, re.1, grid)?;
        for b in brackets {
            roots.push(rootfind::refine_root(real, b, tol.root_tol)?);
        }
    }
    if roots.is_empty() && contour.winding == 1 {
        if let Ok(root) = rootfind::refine_complex_root(&f, rect, tol.root_tol) {
            roots.push(root);
        }
    }
    let unresolved = contour.winding - roots.len() as i64;
    to_json(&EigsOut {
        function,
        contour,
        roots,
        unresolved,
    })
}

#[derive(Serialize)]
pub struct Unsupported {
    pub p: [i64; 2],
    pub q: [i64; 2],
    pub case_label: CaseLabel,
    pub supported: bool,
}

/// Outcome of `euler`: a report, or the classification of an unsupported
/// slice.
pub enum EulerOutcome {
    Report(String),
    Unsupported(String, CaseLabel),
}

pub fn euler(
    p: [i64; 2],
    q: [i64; 2],
    lambda_min: f64,
    lambda_max: Option<f64>,
    tol: &Tolerances,
) -> CliResult<EulerOutcome> {
    let label = euler2d::classify(p, q)?;
    if label != CaseLabel::IMinus {
        let payload = to_json(&Unsupported {
            p,
            q,
            case_label: label,
            supported: false,
        })?;
        return Ok(EulerOutcome::Unsupported(payload, label));
    }
    let policy = PipelinePolicy {
        lambda_min,
        lambda_max,
        root_tol: tol.root_tol,
        jost: tol.jost(),
        sections: tol.sections(),
        ..PipelinePolicy::default()
    };
    let report = euler2d::instability_pipeline(p, q, &policy)?;
    Ok(EulerOutcome::Report(to_json(&report)?))
}

fn push_complex(row: &mut Vec<String>, z: Option<Complex64>) {
    match z {
        Some(z) => {
            row.push(format_sig17(z.re));
            row.push(format_sig17(z.im));
        }
        None => row.extend([String::new(), String::new()]),
    }
}

pub fn sweep<W: Write>(
    model: &ProblemModel,
    re: &Axis,
    im: &Axis,
    all: bool,
    tol: &Tolerances,
    out: W,
) -> CliResult<()> {
    let points: Vec<Complex64> =
        im.0.iter()
            .flat_map(|&y| re.0.iter().map(move |&x| Complex64::new(x, y)))
            .collect();
    if let Some(z) = points.iter().find(|z| band_distance(**z) <= tol.margin) {
        return Err(Error::InvalidInput(format!(
            "grid point {z} is within the band margin {:e}",
            tol.margin
        ))
        .into());
    }
    let policy = tol.report();
    let rows = points
        .par_iter()
        .map(|&lambda| {
            let frame = SpectralFrame::new(lambda)?;
            let mut row = vec![format_sig17(lambda.re), format_sig17(lambda.im)];
            let report = if all {
                Some(DeterminantReport::compute(model, &frame, &policy)?)
            } else {
                None
            };
            let f = match &report {
                Some(r) => r.jost,
                None => jost::jost_function(model, &frame, &policy.jost)?,
            };
            push_complex(&mut row, Some(f));
            row.push(format_sig17(f.norm()));
            if let Some(r) = report {
                push_complex(&mut row, Some(r.det_k));
                push_complex(&mut row, Some(r.det_t));
                push_complex(&mut row, Some(r.evans));
                push_complex(&mut row, r.cont_frac);
                row.push(format_sig17(r.max_pairwise_discrepancy));
            }
            Ok(row)
        })
        .collect::<halfline::Result<Vec<_>>>()?;

    let mut header = vec!["lambda_re", "lambda_im", "F_re", "F_im", "F_abs"];
    if all {
        header.extend([
            "detK_re",
            "detK_im",
            "detT_re",
            "detT_im",
            "evans_re",
            "evans_im",
            "G_re",
            "G_im",
            "discrepancy",
        ]);
    }
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => io_error(e),
        other => CliError::Io(format!("{other:?}")),
    };
    w.write_record(&header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(io_error)?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Io(format!("JSON encoding: {e}")))
}
