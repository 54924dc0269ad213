//! On-disk formats for rankings and labels.

use std::path::Path;

use callout_core::{CallOutOutput, OutlierKind, OutlierRankings};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingLists {
    pub overall: Vec<usize>,
    pub global: Vec<usize>,
    pub local: Vec<usize>,
    pub collective: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreLists {
    pub s_o: Vec<f64>,
    pub s_g: Vec<f64>,
    pub s_c: Vec<f64>,
    pub d_nn: Vec<f64>,
}

/// The `detect` JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingsFile {
    pub n: usize,
    pub rankings: RankingLists,
    pub scores: ScoreLists,
    pub knee_radius: f64,
}

impl RankingsFile {
    pub fn from_output(out: &CallOutOutput) -> Self {
        let r = &out.rankings;
        Self {
            n: r.overall.len(),
            rankings: RankingLists {
                overall: r.overall.clone(),
                global: r.global.clone(),
                local: r.local.clone(),
                collective: r.collective.clone(),
            },
            scores: ScoreLists {
                s_o: out.scores.overall.clone(),
                s_g: out.scores.global.clone(),
                s_c: out.scores.collective.clone(),
                d_nn: out.scores.d_nn.clone(),
            },
            knee_radius: r.knee_radius,
        }
    }

    pub fn to_rankings(&self) -> OutlierRankings {
        OutlierRankings {
            overall: self.rankings.overall.clone(),
            global: self.rankings.global.clone(),
            local: self.rankings.local.clone(),
            collective: self.rankings.collective.clone(),
            knee_radius: self.knee_radius,
            local_set_size: 0,
        }
    }

    /// One row per object: its position in each ranking, then its scores.
    pub fn to_csv(&self) -> CliResult<String> {
        let mut pos = vec![[0usize; 4]; self.n];
        let lists = [
            &self.rankings.overall,
            &self.rankings.global,
            &self.rankings.local,
            &self.rankings.collective,
        ];
        for (k, list) in lists.iter().enumerate() {
            for (p, &i) in list.iter().enumerate() {
                pos[i][k] = p;
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let to_csv_err = |e: csv::Error| CliError::Core(e.into());
        w.write_record(["id", "overall", "global", "local", "collective", "s_o", "s_g", "s_c", "d_nn"])
            .map_err(to_csv_err)?;
        for (i, p) in pos.iter().enumerate() {
            let s = &self.scores;
            w.write_record([
                i.to_string(),
                p[0].to_string(),
                p[1].to_string(),
                p[2].to_string(),
                p[3].to_string(),
                s.s_o[i].to_string(),
                s.s_g[i].to_string(),
                s.s_c[i].to_string(),
                s.d_nn[i].to_string(),
            ])
            .map_err(to_csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Reads the CSV form back; scores are optional there.
    pub fn from_csv(text: &str) -> CliResult<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut rows: Vec<[usize; 5]> = Vec::new();
        let mut scores = ScoreLists { s_o: vec![], s_g: vec![], s_c: vec![], d_nn: vec![] };
        for (r, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::Core(e.into()))?;
            let cell = |k: usize| -> CliResult<&str> {
                record.get(k).ok_or_else(|| {
                    CliError::Usage(format!("rankings CSV row {} has too few columns", r + 2))
                })
            };
            let mut row = [0usize; 5];
            for (k, v) in row.iter_mut().enumerate() {
                *v = cell(k)?.parse().map_err(|_| {
                    CliError::Usage(format!("rankings CSV row {}, column {}: not an index", r + 2, k + 1))
                })?;
            }
            rows.push(row);
            if record.len() >= 9 {
                for (k, list) in [&mut scores.s_o, &mut scores.s_g, &mut scores.s_c, &mut scores.d_nn]
                    .into_iter()
                    .enumerate()
                {
                    list.push(cell(5 + k)?.parse().map_err(|_| {
                        CliError::Usage(format!("rankings CSV row {}: bad score", r + 2))
                    })?);
                }
            }
        }
        let n = rows.len();
        let mut lists = vec![vec![usize::MAX; n]; 4];
        for row in &rows {
            let id = row[0];
            for k in 0..4 {
                let p = row[k + 1];
                if id >= n || p >= n || lists[k][p] != usize::MAX {
                    return Err(CliError::Usage(format!(
                        "rankings CSV does not describe permutations of 0..{n}"
                    )));
                }
                lists[k][p] = id;
            }
        }
        let mut lists = lists.into_iter();
        let mut next = || lists.next().expect("four rankings");
        Ok(Self {
            n,
            rankings: RankingLists {
                overall: next(),
                global: next(),
                local: next(),
                collective: next(),
            },
            scores,
            knee_radius: f64::NAN,
        })
    }

    /// Reads a rankings file in either JSON or CSV form.
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::file(path))?;
        if text.trim_start().starts_with('{') {
            serde_json::from_str(&text).map_err(|source| CliError::Json {
                path: path.to_path_buf(),
                source,
            })
        } else {
            Self::from_csv(&text)
        }
    }
}

/// Labels from the last column of a CSV; a first row whose last cell is not
/// a label is taken as a header.
pub fn read_labels(path: &Path) -> CliResult<Vec<OutlierKind>> {
    let text = std::fs::read_to_string(path).map_err(CliError::file(path))?;
    parse_labels(&text)
}

pub fn parse_labels(text: &str) -> CliResult<Vec<OutlierKind>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Core(e.into()))?;
        let Some(last) = record.iter().next_back().filter(|c| !c.is_empty()) else {
            continue;
        };
        match last.parse::<OutlierKind>() {
            Ok(l) => labels.push(l),
            Err(_) if r == 0 => {}
            Err(e) => return Err(CliError::Usage(format!("labels row {}: {e}", r + 1))),
        }
    }
    if labels.is_empty() {
        return Err(CliError::Core(callout_core::Error::EmptyInput));
    }
    Ok(labels)
}
