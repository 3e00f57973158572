//! Rating assignment by projecting cluster centers onto the rating vector,
//! plus agreement scoring against agency ratings.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{RelarmError, Result};
use crate::io::format_f64;
use crate::kmeans::ClusteringResult;
use crate::matrix::dot;

pub const REPORT_FOOTER: &str = "These categories are model output intended as input for a rating \
committee. They are not a rating action; the final rating decision rests with the committee's experts.";

/// Ordered category labels, best first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct RatingScale {
    labels: Vec<String>,
}

impl RatingScale {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(RelarmError::Config("rating scale needs at least one label".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if l.trim().is_empty() || !seen.insert(l.as_str()) {
                return Err(RelarmError::Config(format!(
                    "rating scale labels must be non-empty and unique, got {labels:?}"
                )));
            }
        }
        Ok(Self { labels })
    }

    pub fn standard() -> Self {
        Self::new(crate::config::standard_scale()).expect("valid built-in scale")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl TryFrom<Vec<String>> for RatingScale {
    type Error = RelarmError;
    fn try_from(v: Vec<String>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RatingScale> for Vec<String> {
    fn from(s: RatingScale) -> Self {
        s.labels
    }
}

/// `|⟨center, Λ⟩|`.
pub fn project_center(center: &[f64], lambda: &[f64]) -> Result<f64> {
    if center.len() != lambda.len() {
        return Err(RelarmError::DimensionMismatch {
            context: "cluster center vs rating vector",
            expected: lambda.len(),
            found: center.len(),
        });
    }
    Ok(dot(center, lambda).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRating {
    /// 0-based cluster index.
    pub cluster: usize,
    pub center: Vec<f64>,
    pub projection: f64,
    /// 0 for the highest projection.
    pub rank: usize,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectRating {
    pub object: String,
    pub cluster: usize,
    pub projection: f64,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingResult {
    pub objects: Vec<ObjectRating>,
    /// Indexed by cluster.
    pub clusters: Vec<ClusterRating>,
    /// Cluster pairs with exactly equal projections.
    pub tie_flags: Vec<(usize, usize)>,
}

impl RatingResult {
    pub fn categories(&self) -> Vec<(String, String)> {
        self.objects
            .iter()
            .map(|o| (o.object.clone(), o.category.clone()))
            .collect()
    }

    pub fn category_of(&self, object: &str) -> Option<&str> {
        self.objects
            .iter()
            .find(|o| o.object == object)
            .map(|o| o.category.as_str())
    }

    /// Rating list: object, 1-based cluster, projection of its cluster, category.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["object", "cluster", "projection", "category"])
            .expect("in-memory write");
        for o in &self.objects {
            w.write_record([
                o.object.as_str(),
                &(o.cluster + 1).to_string(),
                &format_f64(o.projection),
                &o.category,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Rank of each cluster (0 is best) and the tied cluster pairs.
pub type CategoryBinding = (Vec<usize>, Vec<(usize, usize)>);

/// Binds categories to clusters by descending projection. Exact ties are
/// broken by ascending cluster index and reported in `tie_flags`.
pub fn bind_categories(projections: &[f64], scale: &RatingScale) -> Result<CategoryBinding> {
    let k = projections.len();
    if scale.len() != k {
        return Err(RelarmError::DimensionMismatch {
            context: "rating scale length vs cluster count",
            expected: k,
            found: scale.len(),
        });
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| projections[b].total_cmp(&projections[a]).then(a.cmp(&b)));
    let mut rank = vec![0; k];
    for (r, &q) in order.iter().enumerate() {
        rank[q] = r;
    }
    let mut ties = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if projections[a] == projections[b] {
                ties.push((a, b));
            }
        }
    }
    Ok((rank, ties))
}

pub fn assign_ratings(
    objects: &[String],
    clusters: &ClusteringResult,
    lambda: &[f64],
    scale: &RatingScale,
) -> Result<RatingResult> {
    if objects.len() != clusters.assignments.len() {
        return Err(RelarmError::DimensionMismatch {
            context: "object ids vs cluster assignments",
            expected: clusters.assignments.len(),
            found: objects.len(),
        });
    }
    let projections = clusters
        .centers
        .rows()
        .map(|c| project_center(c, lambda))
        .collect::<Result<Vec<_>>>()?;
    let (rank, tie_flags) = bind_categories(&projections, scale)?;
    let cluster_ratings: Vec<ClusterRating> = (0..clusters.k())
        .map(|q| ClusterRating {
            cluster: q,
            center: clusters.centers.row(q).to_vec(),
            projection: projections[q],
            rank: rank[q],
            category: scale.labels()[rank[q]].clone(),
        })
        .collect();
    let object_ratings = objects
        .iter()
        .zip(&clusters.assignments)
        .map(|(id, &q)| ObjectRating {
            object: id.clone(),
            cluster: q,
            projection: projections[q],
            category: cluster_ratings[q].category.clone(),
        })
        .collect();
    Ok(RatingResult {
        objects: object_ratings,
        clusters: cluster_ratings,
        tie_flags,
    })
}

/// Reads (object, category) pairs from a rating list CSV. Only the `object`
/// and `category` columns are required.
pub fn parse_rating_list(text: &str) -> Result<Vec<(String, String)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| RelarmError::csv("<ratings>", e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| RelarmError::InvalidDataset(format!("rating list lacks a {name:?} column")))
    };
    let (oc, cc) = (col("object")?, col("category")?);
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| RelarmError::csv("<ratings>", e))?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        let get = |c: usize, name: &str| {
            rec.get(c).filter(|s| !s.is_empty()).map(str::to_owned).ok_or_else(|| {
                RelarmError::MissingCell {
                    row,
                    column: c + 1,
                    name: name.to_owned(),
                }
            })
        };
        out.push((get(oc, "object")?, get(cc, "category")?));
    }
    Ok(out)
}

/// Maps agency codes (`AA+`, `Baa2`, …) onto coarse scale categories;
/// `None` marks "not rated".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseTable {
    entries: BTreeMap<String, Option<String>>,
}

impl Default for CollapseTable {
    fn default() -> Self {
        let entries = serde_json::from_str(include_str!("../data/collapse.json"))
            .expect("built-in collapse table is valid JSON");
        Self { entries }
    }
}

impl CollapseTable {
    pub fn from_entries(entries: BTreeMap<String, Option<String>>) -> Self {
        Self { entries }
    }

    /// Default table with `overrides` layered on top.
    pub fn with_overrides(overrides: &BTreeMap<String, Option<String>>) -> Self {
        let mut t = Self::default();
        t.entries
            .extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
        t
    }

    /// Coarse category for `code`. Codes already on the scale map to
    /// themselves when the table has no entry.
    pub fn collapse(&self, code: &str, scale: &RatingScale) -> Result<Option<String>> {
        let code = code.trim();
        let mapped = match self.entries.get(code) {
            Some(None) => return Ok(None),
            Some(Some(c)) => c.as_str(),
            None => code,
        };
        if scale.contains(mapped) {
            Ok(Some(mapped.to_owned()))
        } else {
            Err(RelarmError::UncollapsibleCategory(code.to_owned()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceRating {
    pub object: String,
    pub agency: String,
    pub category: String,
}

/// Reference CSV with columns `object, agency, category`.
pub fn parse_reference(text: &str) -> Result<Vec<ReferenceRating>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.deserialize() {
        out.push(rec.map_err(|e| RelarmError::csv("<reference>", e))?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgencyComparison {
    pub agency: String,
    pub reported: String,
    /// `None` when the agency does not rate the object.
    pub collapsed: Option<String>,
    pub matches: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectAgreement {
    pub object: String,
    pub model_category: String,
    pub agencies: Vec<AgencyComparison>,
    /// `None` when no agency rates the object; such objects are left out of
    /// the denominator.
    pub matched: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub objects: Vec<ObjectAgreement>,
    pub matched: usize,
    pub comparable: usize,
    pub match_fraction: Option<f64>,
    pub status: String,
    pub warnings: Vec<String>,
    pub footer: String,
}

impl AgreementReport {
    pub fn to_json(&self) -> String {
        crate::io::to_json_pretty(self)
    }
}

/// An object matches when its model category equals the collapsed category
/// of at least one agency that rates it.
pub fn score_agreement(
    model: &[(String, String)],
    reference: &[ReferenceRating],
    collapse: &CollapseTable,
    scale: &RatingScale,
) -> Result<AgreementReport> {
    let rated: HashSet<&str> = model.iter().map(|(o, _)| o.as_str()).collect();
    let mut by_object: HashMap<&str, Vec<&ReferenceRating>> = HashMap::new();
    let mut warnings = Vec::new();
    let mut warned = HashSet::new();
    for r in reference {
        if rated.contains(r.object.as_str()) {
            by_object.entry(r.object.as_str()).or_default().push(r);
        } else if warned.insert(r.object.as_str()) {
            warnings.push(format!(
                "reference object {:?} has no model rating; skipped",
                r.object
            ));
        }
    }

    let mut objects = Vec::with_capacity(model.len());
    let (mut matched, mut comparable) = (0, 0);
    for (object, category) in model {
        let mut agencies = Vec::new();
        for r in by_object.get(object.as_str()).into_iter().flatten() {
            let collapsed = collapse.collapse(&r.category, scale)?;
            let matches = collapsed.as_ref().map(|c| c == category);
            agencies.push(AgencyComparison {
                agency: r.agency.clone(),
                reported: r.category.clone(),
                collapsed,
                matches,
            });
        }
        let verdicts: Vec<bool> = agencies.iter().filter_map(|a| a.matches).collect();
        let object_matched = (!verdicts.is_empty()).then(|| verdicts.iter().any(|&m| m));
        if let Some(m) = object_matched {
            comparable += 1;
            matched += usize::from(m);
        }
        objects.push(ObjectAgreement {
            object: object.clone(),
            model_category: category.clone(),
            agencies,
            matched: object_matched,
        });
    }

    let match_fraction = (comparable > 0).then(|| matched as f64 / comparable as f64);
    let status = match match_fraction {
        Some(f) => format!("{matched}/{comparable} comparable objects match ({:.1}%)", 100.0 * f),
        None => "no comparable objects".to_owned(),
    };
    Ok(AgreementReport {
        objects,
        matched,
        comparable,
        match_fraction,
        status,
        warnings,
        footer: REPORT_FOOTER.to_owned(),
    })
}
