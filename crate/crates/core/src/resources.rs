//! Everything the heuristic models read: lexicons, gazetteers, corpora and
//! templates. A default set is compiled in; a data directory can replace any
//! file by providing one at the same relative path.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use thiserror::Error;

use crate::corpus::{load_recipes, load_tasks, CorpusError};
use crate::diy::{CommonsenseLexicon, IdfTable};
use crate::generators::{parse_fun_facts, DocView, FunFactIndex, SocialTemplates};
use crate::lexicon::{LoadError, PhraseLexicon};
use crate::nlu::{Domain, DomainLexicons};
use crate::pos::PosTagger;
use crate::qa::SubstitutionTable;
use crate::recipe::Gazetteers;
use crate::retrieval::{RecipeIndex, TaskIndex};
use crate::state::{DocKind, DocRef};
use crate::text::Stopwords;

macro_rules! bundled_files {
    ($($path:literal),* $(,)?) => {
        const BUNDLED: &[(&str, &str)] = &[$(($path, include_str!(concat!("../data/", $path)))),*];
    };
}

bundled_files!(
    "pos_lexicon.tsv",
    "stopwords.txt",
    "commonsense.tsv",
    "generalizations.tsv",
    "negation_cues.txt",
    "tasks.jsonl",
    "recipes.jsonl",
    "fun_facts.tsv",
    "substitutions.tsv",
    "social_templates.tsv",
    "suggestions.txt",
    "prompt_templates.txt",
    "gazetteers/dishes.tsv",
    "gazetteers/ingredients.tsv",
    "gazetteers/cuisines.tsv",
    "gazetteers/courses.tsv",
    "gazetteers/occasions.tsv",
    "domains/diy.tsv",
    "domains/cooking.tsv",
    "domains/finance.tsv",
    "domains/harm.tsv",
    "domains/law.tsv",
    "domains/love_relationship.tsv",
    "domains/medicine.tsv",
    "domains/out_of_domain.tsv",
    "domains/porn_gambling_drugs.tsv",
);

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lexicon(#[from] LoadError),
    #[error("{file}: {source}")]
    Corpus {
        file: String,
        #[source]
        source: CorpusError,
    },
    #[error("{0} is empty")]
    Empty(String),
    #[error("no bundled resource named {0}")]
    Unknown(String),
}

#[derive(Debug)]
pub struct Knowledge {
    pub tagger: PosTagger,
    pub stopwords: Stopwords,
    pub commonsense: CommonsenseLexicon,
    pub domains: DomainLexicons,
    pub gazetteers: Gazetteers,
    pub idf: IdfTable,
    pub tasks: TaskIndex,
    pub recipes: RecipeIndex,
    pub fun_facts: FunFactIndex,
    pub substitutions: SubstitutionTable,
    pub social: SocialTemplates,
    pub suggestions: Vec<String>,
    pub prompt_templates: Vec<String>,
}

fn lines(text: &str) -> Vec<String> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_string).collect()
}

struct Source<'a> {
    dir: Option<&'a Path>,
}

impl Source<'_> {
    fn read(&self, name: &str) -> Result<String, ResourceError> {
        if let Some(dir) = self.dir {
            let path = dir.join(name);
            if path.is_file() {
                return std::fs::read_to_string(&path).map_err(|source| ResourceError::Io { path, source });
            }
        }
        BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| text.to_string())
            .ok_or_else(|| ResourceError::Unknown(name.to_string()))
    }

    fn lexicon(&self, name: &str) -> Result<PhraseLexicon, ResourceError> {
        Ok(PhraseLexicon::parse(&self.read(name)?).map_err(|e| e.in_file(name))?)
    }
}

impl Knowledge {
    /// The compiled-in resources, built once.
    pub fn bundled() -> &'static Knowledge {
        static BUNDLED_KB: OnceLock<Knowledge> = OnceLock::new();
        BUNDLED_KB.get_or_init(|| Knowledge::load(None).expect("bundled resources are valid"))
    }

    /// Build from `dir`, falling back to the compiled-in copy of every file
    /// the directory does not provide.
    pub fn load(dir: Option<&Path>) -> Result<Knowledge, ResourceError> {
        let src = Source { dir };
        let file = |name: &'static str| move |e: LoadError| e.in_file(name);

        let tagger = PosTagger::parse(&src.read("pos_lexicon.tsv")?).map_err(file("pos_lexicon.tsv"))?;
        let stopwords = Stopwords::parse(&src.read("stopwords.txt")?);
        let commonsense = CommonsenseLexicon::parse(&src.read("commonsense.tsv")?, &src.read("generalizations.tsv")?)
            .map_err(file("commonsense.tsv"))?;
        let domains = DomainLexicons::new(
            Domain::ALL.iter().map(|d| src.lexicon(&format!("domains/{}.tsv", d.lexicon_name()))).collect::<Result<_, _>>()?,
        );
        let negation_cues = lines(&src.read("negation_cues.txt")?);
        let gazetteers = Gazetteers::new(
            src.lexicon("gazetteers/dishes.tsv")?,
            src.lexicon("gazetteers/ingredients.tsv")?,
            src.lexicon("gazetteers/cuisines.tsv")?,
            src.lexicon("gazetteers/courses.tsv")?,
            src.lexicon("gazetteers/occasions.tsv")?,
            &negation_cues,
        );
        let tasks = load_tasks(&src.read("tasks.jsonl")?)
            .map_err(|source| ResourceError::Corpus { file: "tasks.jsonl".into(), source })?;
        let recipes = load_recipes(&src.read("recipes.jsonl")?)
            .map_err(|source| ResourceError::Corpus { file: "recipes.jsonl".into(), source })?;
        if tasks.is_empty() && recipes.is_empty() {
            return Err(ResourceError::Empty("the task and recipe corpus".into()));
        }
        let idf = IdfTable::from_tasks(&tasks);
        let fun_facts =
            FunFactIndex::build(parse_fun_facts(&src.read("fun_facts.tsv")?).map_err(file("fun_facts.tsv"))?, &stopwords);
        let substitutions = SubstitutionTable::parse(&src.read("substitutions.tsv")?).map_err(file("substitutions.tsv"))?;
        let social = SocialTemplates::parse(&src.read("social_templates.tsv")?).map_err(file("social_templates.tsv"))?;
        let suggestions = lines(&src.read("suggestions.txt")?);
        let prompt_templates = lines(&src.read("prompt_templates.txt")?);
        if prompt_templates.is_empty() {
            return Err(ResourceError::Empty("prompt_templates.txt".into()));
        }
        Ok(Knowledge {
            tagger,
            stopwords,
            commonsense,
            domains,
            gazetteers,
            idf,
            tasks: TaskIndex::build(tasks),
            recipes: RecipeIndex::build(recipes),
            fun_facts,
            substitutions,
            social,
            suggestions,
            prompt_templates,
        })
    }

    pub fn doc(&self, doc: &DocRef) -> Option<DocView<'_>> {
        match doc.kind {
            DocKind::Task => self.tasks.get(&doc.id).map(DocView::Task),
            DocKind::Recipe => self.recipes.get(&doc.id).map(DocView::Recipe),
        }
    }

    /// Look an id up in both corpora, tasks first.
    pub fn find_doc(&self, id: &str) -> Option<DocView<'_>> {
        self.tasks.get(id).map(DocView::Task).or_else(|| self.recipes.get(id).map(DocView::Recipe))
    }
}
