//! Task and recipe documents and their line-delimited JSON loaders.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDocument {
    pub id: String,
    pub title: String,
    pub steps: Vec<String>,
    #[serde(default)]
    pub tools: Vec<String>,
    #[serde(default)]
    pub summary: String,
    /// Used only to order recommendations.
    #[serde(default)]
    pub popularity: u32,
}

impl TaskDocument {
    /// Title without a leading "How to ".
    pub fn display_name(&self) -> &str {
        let t = self.title.trim();
        match t.get(..7) {
            Some(p) if p.eq_ignore_ascii_case("how to ") => &t[7..],
            _ => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ingredient {
    pub name: String,
    pub quantity: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecipeDocument {
    pub id: String,
    pub name: String,
    pub ingredients: Vec<Ingredient>,
    #[serde(default)]
    pub cuisine: Option<String>,
    #[serde(default)]
    pub meal_course: Option<String>,
    #[serde(default)]
    pub occasion: Option<String>,
    pub steps: Vec<String>,
    #[serde(default)]
    pub popularity: u32,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

fn load_lines<T: for<'de> Deserialize<'de>>(
    text: &str,
    check: impl Fn(&T) -> Result<String, String>,
) -> Result<Vec<T>, CorpusError> {
    let mut ids = HashSet::new();
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let doc: T = serde_json::from_str(line).map_err(|source| CorpusError::Parse { line: line_no, source })?;
        let id = check(&doc).map_err(|message| CorpusError::Invalid { line: line_no, message })?;
        if !ids.insert(id.clone()) {
            return Err(CorpusError::Invalid { line: line_no, message: format!("duplicate id {id:?}") });
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// Parse one task per line. Any invalid line rejects the whole file.
pub fn load_tasks(text: &str) -> Result<Vec<TaskDocument>, CorpusError> {
    load_lines(text, |t: &TaskDocument| {
        if t.id.trim().is_empty() {
            return Err("empty id".into());
        }
        if t.title.trim().is_empty() {
            return Err(format!("task {:?} has an empty title", t.id));
        }
        if t.steps.is_empty() {
            return Err(format!("task {:?} has no steps", t.id));
        }
        Ok(t.id.clone())
    })
}

/// Parse one recipe per line. Any invalid line rejects the whole file.
pub fn load_recipes(text: &str) -> Result<Vec<RecipeDocument>, CorpusError> {
    load_lines(text, |r: &RecipeDocument| {
        if r.id.trim().is_empty() {
            return Err("empty id".into());
        }
        if r.name.trim().is_empty() {
            return Err(format!("recipe {:?} has an empty name", r.id));
        }
        if r.ingredients.is_empty() {
            return Err(format!("recipe {:?} has no ingredients", r.id));
        }
        if r.steps.is_empty() {
            return Err(format!("recipe {:?} has no steps", r.id));
        }
        Ok(r.id.clone())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corpora_load() {
        let tasks = load_tasks(include_str!("../data/tasks.jsonl")).unwrap();
        let recipes = load_recipes(include_str!("../data/recipes.jsonl")).unwrap();
        assert!(tasks.len() >= 20);
        assert!(recipes.len() >= 30);
    }

    #[test]
    fn invalid_line_rejects_file() {
        let good = r#"{"id":"a","title":"How to Paint","steps":["Paint."]}"#;
        let no_steps = r#"{"id":"b","title":"How to Sand","steps":[]}"#;
        let err = load_tasks(&format!("{good}\n{no_steps}\n")).unwrap_err();
        assert!(matches!(err, CorpusError::Invalid { line: 2, .. }));
        let dup = load_tasks(&format!("{good}\n{good}\n")).unwrap_err();
        assert!(dup.to_string().contains("duplicate"));
        assert!(matches!(load_tasks("{oops").unwrap_err(), CorpusError::Parse { line: 1, .. }));
    }

    #[test]
    fn display_name_strips_prefix() {
        let t: TaskDocument = serde_json::from_str(r#"{"id":"a","title":"How to Repair a Roof","steps":["x"]}"#).unwrap();
        assert_eq!(t.display_name(), "Repair a Roof");
    }
}
