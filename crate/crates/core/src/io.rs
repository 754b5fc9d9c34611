//! JSON file formats.
//!
//! Matrices are written as separate real and imaginary row-major arrays,
//! `{"re": [[..]], "im": [[..]]}`. Words are lists of 1-based letters.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::freecore::{FreeSeries, MatrixTuple, Word};
use crate::funcalc::DiscreteMeasure;
use crate::linalg::CMat;
use crate::ordertest::{TestReport, Verdict, Witness, WitnessKind};
use crate::realize::{ButterflyRealization, MonotoneRealization};
use crate::scalar::{cplx, lit, to_f64, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(m: &CMat<T>) -> Self {
        let rows = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(i, j)).collect()).collect()
        };
        MatrixJson { re: rows(&|i, j| to_f64(m[(i, j)].re)), im: rows(&|i, j| to_f64(m[(i, j)].im)) }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<CMat<T>> {
        let r = self.re.len();
        let c = self.re.first().map_or(0, Vec::len);
        if self.im.len() != r {
            return Err(Error::Format(format!("re has {r} rows but im has {}", self.im.len())));
        }
        for (i, (a, b)) in self.re.iter().zip(&self.im).enumerate() {
            if a.len() != c || b.len() != c {
                return Err(Error::Format(format!("row {i} is ragged, expected {c} columns")));
            }
        }
        Ok(CMat::from_fn(r, c, |i, j| cplx(self.re[i][j], self.im[i][j])))
    }
}

fn matrices<T: Real>(ms: &[CMat<T>]) -> Vec<MatrixJson> {
    ms.iter().map(MatrixJson::from_matrix).collect()
}

fn unpack<T: Real>(ms: &[MatrixJson]) -> Result<Vec<CMat<T>>> {
    ms.iter().map(MatrixJson::to_matrix).collect()
}

fn square<T: Real>(m: &MatrixJson, n: usize, what: &str) -> Result<CMat<T>> {
    let out = m.to_matrix()?;
    if out.nrows() != n || out.ncols() != n {
        return Err(Error::Format(format!("{what} is {}x{}, expected {n}x{n}", out.nrows(), out.ncols())));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub word: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesFile {
    pub d: usize,
    pub degree: usize,
    pub k: usize,
    pub terms: Vec<TermJson>,
}

impl SeriesFile {
    /// Terms in shortlex word order.
    pub fn from_series<T: Real>(s: &FreeSeries<T>) -> Self {
        let terms = s
            .terms()
            .map(|(w, c)| {
                let m = MatrixJson::from_matrix(c);
                TermJson { word: w.letters().to_vec(), re: m.re, im: m.im }
            })
            .collect();
        SeriesFile { d: s.letters(), degree: s.degree(), k: s.dim(), terms }
    }

    pub fn to_series<T: Real>(&self) -> Result<FreeSeries<T>> {
        if self.k == 0 {
            return Err(Error::Format("coefficient size k must be positive".into()));
        }
        let mut s = FreeSeries::zero(self.d, self.degree, self.k);
        for t in &self.terms {
            let m = MatrixJson { re: t.re.clone(), im: t.im.clone() };
            let c = square(&m, self.k, &format!("coefficient of word {:?}", t.word))?;
            let w = Word::new(t.word.clone());
            if !w.fits(self.d) {
                return Err(Error::Format(format!("word {:?} uses a letter outside 1..={}", t.word, self.d)));
            }
            if w.len() > self.degree {
                return Err(Error::Format(format!("word {:?} exceeds degree {}", t.word, self.degree)));
            }
            s.insert(w, c)?;
        }
        Ok(s)
    }
}

/// Hex SHA-256 of the canonical series file encoding.
pub fn series_hash<T: Real>(s: &FreeSeries<T>) -> String {
    let bytes = serde_json::to_vec(&SeriesFile::from_series(s)).expect("series encodes");
    sha256_hex(&bytes)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub a: f64,
    pub b: Option<f64>,
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MeasureFile {
    pub fn from_measure<T: Real>(a: T, b: Option<T>, mu: &DiscreteMeasure<T>) -> Self {
        MeasureFile {
            a: to_f64(a),
            b: b.map(to_f64),
            atoms: mu.atoms().iter().map(|&x| to_f64(x)).collect(),
            weights: mu.weights().iter().map(|&x| to_f64(x)).collect(),
        }
    }

    pub fn to_measure<T: Real>(&self) -> Result<DiscreteMeasure<T>> {
        DiscreteMeasure::new(self.atoms.iter().map(|&x| lit(x)).collect(), self.weights.iter().map(|&x| lit(x)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RealizationFile {
    Monotone {
        k: usize,
        r: usize,
        m: usize,
        a0: MatrixJson,
        #[serde(rename = "A")]
        a: MatrixJson,
        #[serde(rename = "P")]
        p: Vec<MatrixJson>,
        #[serde(rename = "Q")]
        q: MatrixJson,
        series_hash: String,
    },
    Butterfly {
        k: usize,
        r: usize,
        m: usize,
        a0: MatrixJson,
        #[serde(rename = "T")]
        t: Vec<MatrixJson>,
        #[serde(rename = "Q_i")]
        q: Vec<MatrixJson>,
        #[serde(rename = "L")]
        l: Vec<MatrixJson>,
        series_hash: String,
    },
}

/// A decoded realization of either kind.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyRealization<T: Real> {
    Monotone(MonotoneRealization<T>),
    Butterfly(ButterflyRealization<T>),
}

impl RealizationFile {
    pub fn from_monotone<T: Real>(r: &MonotoneRealization<T>, series_hash: String) -> Self {
        RealizationFile::Monotone {
            k: r.k(),
            r: r.r(),
            m: r.m,
            a0: MatrixJson::from_matrix(&r.a0),
            a: MatrixJson::from_matrix(&r.a),
            p: matrices(&r.p),
            q: MatrixJson::from_matrix(&r.q),
            series_hash,
        }
    }

    pub fn from_butterfly<T: Real>(r: &ButterflyRealization<T>, series_hash: String) -> Self {
        RealizationFile::Butterfly {
            k: r.k(),
            r: r.r(),
            m: r.m,
            a0: MatrixJson::from_matrix(&r.a0),
            t: matrices(&r.t),
            q: matrices(&r.q),
            l: matrices(&r.l),
            series_hash,
        }
    }

    pub fn series_hash(&self) -> &str {
        match self {
            RealizationFile::Monotone { series_hash, .. } | RealizationFile::Butterfly { series_hash, .. } => series_hash,
        }
    }

    /// Decodes and checks shapes against the stored `k` and `r`.
    pub fn decode<T: Real>(&self) -> Result<AnyRealization<T>> {
        let rect = |m: &MatrixJson, rows: usize, cols: usize, what: &str| -> Result<CMat<T>> {
            let out = m.to_matrix::<T>()?;
            if out.nrows() != rows || out.ncols() != cols {
                return Err(Error::Format(format!(
                    "{what} is {}x{}, expected {rows}x{cols}",
                    out.nrows(),
                    out.ncols()
                )));
            }
            Ok(out)
        };
        match self {
            RealizationFile::Monotone { k, r, m, a0, a, p, q, .. } => {
                let p = p.iter().map(|x| square(x, *r, "P_i")).collect::<Result<Vec<_>>>()?;
                if p.is_empty() {
                    return Err(Error::Format("monotone realization needs at least one projection".into()));
                }
                Ok(AnyRealization::Monotone(MonotoneRealization {
                    a0: square(a0, *k, "a0")?,
                    a: square(a, *r, "A")?,
                    p,
                    q: rect(q, *r, *k, "Q")?,
                    m: *m,
                }))
            }
            RealizationFile::Butterfly { k, r, m, a0, t, q, l, .. } => {
                let d = t.len();
                if d == 0 || q.len() != d || l.len() != d {
                    return Err(Error::Format(format!(
                        "butterfly realization needs equal positive counts of T, Q_i, L (got {}, {}, {})",
                        t.len(),
                        q.len(),
                        l.len()
                    )));
                }
                Ok(AnyRealization::Butterfly(ButterflyRealization {
                    a0: square(a0, *k, "a0")?,
                    t: t.iter().map(|x| square(x, *r, "T_i")).collect::<Result<_>>()?,
                    q: q.iter().map(|x| rect(x, *r, *k, "Q_i")).collect::<Result<_>>()?,
                    l: l.iter().map(|x| square(x, *k, "L_i")).collect::<Result<_>>()?,
                    m: *m,
                }))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointFile {
    #[serde(rename = "Z")]
    pub z: Vec<MatrixJson>,
}

impl PointFile {
    pub fn from_tuple<T: Real>(z: &MatrixTuple<T>) -> Self {
        PointFile { z: matrices(z.entries()) }
    }

    pub fn to_tuple<T: Real>(&self) -> Result<MatrixTuple<T>> {
        MatrixTuple::new(unpack(&self.z)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub kind: String,
    #[serde(rename = "A")]
    pub a: Vec<MatrixJson>,
    #[serde(rename = "B")]
    pub b: Vec<MatrixJson>,
    pub min_eig: f64,
    pub level: usize,
    pub trial: usize,
}

/// Order-test report; `manifest` records the run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub verdict: String,
    pub samples: usize,
    pub witness: Option<WitnessJson>,
    pub seed: u64,
    pub tol: f64,
    #[serde(default)]
    pub manifest: serde_json::Value,
}

impl ReportFile {
    pub fn from_report<T: Real>(r: &TestReport<T>, manifest: serde_json::Value) -> Self {
        ReportFile {
            verdict: r.verdict.as_str().to_string(),
            samples: r.samples,
            witness: r.witness.as_ref().map(|w| WitnessJson {
                kind: w.kind.as_str().to_string(),
                a: matrices(w.a.entries()),
                b: matrices(w.b.entries()),
                min_eig: to_f64(w.min_eig),
                level: w.level,
                trial: w.trial,
            }),
            seed: r.seed,
            tol: to_f64(r.tol),
            manifest,
        }
    }

    pub fn to_report<T: Real>(&self) -> Result<TestReport<T>> {
        let witness = match &self.witness {
            None => None,
            Some(w) => Some(Witness {
                kind: WitnessKind::parse(&w.kind)?,
                a: MatrixTuple::new(unpack(&w.a)?)?,
                b: MatrixTuple::new(unpack(&w.b)?)?,
                min_eig: lit(w.min_eig),
                level: w.level,
                trial: w.trial,
            }),
        };
        Ok(TestReport {
            verdict: Verdict::parse(&self.verdict)?,
            samples: self.samples,
            witness,
            tol: lit(self.tol),
            seed: self.seed,
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value encodes");
    s.push('\n');
    s
}

pub fn from_json<S: serde::de::DeserializeOwned>(text: &str) -> Result<S> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecore::{all_ones_series, geometric_series};
    use crate::realize::{build_butterfly_realization, build_monotone_realization};

    #[test]
    fn series_round_trip() {
        let s = all_ones_series::<f64>(2, 3);
        let text = to_json(&SeriesFile::from_series(&s));
        let back: SeriesFile = from_json(&text).unwrap();
        assert_eq!(back.to_series::<f64>().unwrap(), s);
        assert_eq!(back.terms[0].word, vec![1]);
    }

    #[test]
    fn hash_is_stable_and_content_sensitive() {
        let a = series_hash(&geometric_series::<f64>(4));
        assert_eq!(a.len(), 64);
        assert_eq!(a, series_hash(&geometric_series::<f64>(4)));
        assert_ne!(a, series_hash(&geometric_series::<f64>(5)));
    }

    #[test]
    fn realization_round_trip() {
        let s = geometric_series::<f64>(5);
        let m = build_monotone_realization(&s, 2).unwrap();
        let f = RealizationFile::from_monotone(&m, series_hash(&s));
        let back: RealizationFile = from_json(&to_json(&f)).unwrap();
        assert_eq!(back.decode::<f64>().unwrap(), AnyRealization::Monotone(m));
        assert!(to_json(&f).contains("\"kind\": \"monotone\""));
        let b = build_butterfly_realization(&s, 2).unwrap();
        let f = RealizationFile::from_butterfly(&b, series_hash(&s));
        let back: RealizationFile = from_json(&to_json(&f)).unwrap();
        assert_eq!(back.decode::<f64>().unwrap(), AnyRealization::Butterfly(b));
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(from_json::<SeriesFile>("{").is_err());
        let bad = SeriesFile {
            d: 1,
            degree: 2,
            k: 1,
            terms: vec![TermJson { word: vec![2], re: vec![vec![1.0]], im: vec![vec![0.0]] }],
        };
        assert!(bad.to_series::<f64>().is_err());
        let ragged = MatrixJson { re: vec![vec![1.0, 2.0], vec![3.0]], im: vec![vec![0.0, 0.0], vec![0.0]] };
        assert!(ragged.to_matrix::<f64>().is_err());
    }

    #[test]
    fn measure_round_trip() {
        let mu = DiscreteMeasure::<f64>::new(vec![-0.5, 0.25], vec![0.3, 0.7]).unwrap();
        let f = MeasureFile::from_measure(1.0, None, &mu);
        let back: MeasureFile = from_json(&to_json(&f)).unwrap();
        assert_eq!(back.to_measure::<f64>().unwrap(), mu);
        assert!(to_json(&f).contains("\"b\": null"));
    }
}
