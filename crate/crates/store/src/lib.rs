//! Persistent records of data policies and registered app policies.
//!
//! On disk a store is a directory holding
//!
//! ```text
//! manifest.json
//! objects/<first two hex digits>/<sha256 of document>.ttl
//! ```
//!
//! Every document is stored once under its content hash. The manifest maps
//! data URIs and registration ids to those objects and carries timestamps and
//! provenance. Both kinds of file are written to a temporary name and renamed
//! into place, so readers of the directory never see a partial file.
//!
//! In memory the manifest is cached behind a lock. Writers are serialised by
//! a separate mutex and publish a new snapshot only after the manifest is on
//! disk; readers always see either the old or the new state.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use chrono::{DateTime, Utc};
use dtou_core::policy::{extract_app_policy_with, extract_data_policies_with, PolicyError};
use dtou_core::{parse_turtle, Vocab};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

/// The app and output a derived policy came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub app_name: String,
    pub output_port: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyRecord {
    pub data_uri: String,
    pub policy_document: String,
    pub created_at: DateTime<Utc>,
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppRegistration {
    pub registration_id: String,
    pub app_policy_document: String,
    pub registered_at: DateTime<Utc>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("invalid document: {0}")]
    Invalid(#[from] PolicyError),
    #[error("document describes {found} data nodes, expected exactly one")]
    DataCount { found: usize },
    #[error("document is for <{found}>, not <{expected}>")]
    UriMismatch { expected: String, found: String },
    #[error("store i/o: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("manifest version {0} is not supported")]
    Version(u32),
}

#[derive(Debug, Clone)]
pub struct StoreConfig {
    /// Registrations older than this are treated as absent.
    pub registration_ttl: Duration,
    pub vocab: Vocab,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig { registration_ttl: Duration::from_secs(24 * 60 * 60), vocab: Vocab::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolicyEntry {
    data_uri: String,
    object: String,
    created_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AppEntry {
    registration_id: String,
    object: String,
    registered_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    policies: Vec<PolicyEntry>,
    apps: Vec<AppEntry>,
}

/// Cached view of the manifest with documents loaded.
#[derive(Debug, Clone, Default)]
struct State {
    policies: BTreeMap<String, (PolicyEntry, Arc<str>)>,
    apps: BTreeMap<String, (AppEntry, Arc<str>)>,
}

impl State {
    fn manifest(&self) -> Manifest {
        Manifest {
            version: MANIFEST_VERSION,
            policies: self.policies.values().map(|(e, _)| e.clone()).collect(),
            apps: self.apps.values().map(|(e, _)| e.clone()).collect(),
        }
    }
}

pub struct Store {
    root: PathBuf,
    config: StoreConfig,
    state: RwLock<Arc<State>>,
    writer: Mutex<()>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store").field("root", &self.root).finish_non_exhaustive()
    }
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        Self::open_with(root, StoreConfig::default())
    }

    /// Opens or creates the store at `root`.
    pub fn open_with(root: impl Into<PathBuf>, config: StoreConfig) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join("objects"))?;
        let state = match fs::read(root.join(MANIFEST)) {
            Ok(bytes) => load(&root, serde_json::from_slice(&bytes)?)?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => State::default(),
            Err(e) => return Err(e.into()),
        };
        Ok(Store { root, config, state: RwLock::new(Arc::new(state)), writer: Mutex::new(()) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    fn snapshot(&self) -> Arc<State> {
        self.state.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Validates and stores `document` as the policy of `uri`, replacing any
    /// previous record.
    pub fn put_policy(&self, uri: &str, document: &str) -> Result<PolicyRecord, StoreError> {
        self.put(uri, document, None)
    }

    /// As [`Store::put_policy`], recording where a derived policy came from.
    pub fn put_derived_policy(
        &self,
        uri: &str,
        document: &str,
        provenance: Provenance,
    ) -> Result<PolicyRecord, StoreError> {
        self.put(uri, document, Some(provenance))
    }

    fn put(&self, uri: &str, document: &str, provenance: Option<Provenance>) -> Result<PolicyRecord, StoreError> {
        let graph = parse_turtle(document, None).map_err(PolicyError::from)?;
        let sets = extract_data_policies_with(&graph, &self.config.vocab)?;
        let [set] = sets.as_slice() else {
            return Err(StoreError::DataCount { found: sets.len() });
        };
        if set.uri.as_str() != uri {
            return Err(StoreError::UriMismatch { expected: uri.to_owned(), found: set.uri.to_string() });
        }
        let entry = PolicyEntry {
            data_uri: uri.to_owned(),
            object: String::new(),
            created_at: Utc::now(),
            provenance,
        };
        let (entry, text) = self.commit(document, |state, object, text| {
            let entry = PolicyEntry { object: object.to_owned(), ..entry };
            state.policies.insert(uri.to_owned(), (entry.clone(), text));
            entry
        })?;
        Ok(policy_record(&entry, &text))
    }

    pub fn get_policy(&self, uri: &str) -> Option<PolicyRecord> {
        self.snapshot().policies.get(uri).map(|(e, text)| policy_record(e, text))
    }

    /// All policy records, ordered by data URI.
    pub fn list_policies(&self) -> Vec<PolicyRecord> {
        self.snapshot().policies.values().map(|(e, text)| policy_record(e, text)).collect()
    }

    /// Validates and stores an app policy under a fresh random id.
    pub fn register_app(&self, document: &str) -> Result<AppRegistration, StoreError> {
        let graph = parse_turtle(document, None).map_err(PolicyError::from)?;
        extract_app_policy_with(&graph, &self.config.vocab)?;
        let registration_id = format!("{:032x}", rand::random::<u128>());
        let now = Utc::now();
        let ttl = self.config.registration_ttl;
        let (entry, text) = self.commit(document, |state, object, text| {
            state.apps.retain(|_, (e, _)| !expired(e.registered_at, now, ttl));
            let entry = AppEntry { registration_id: registration_id.clone(), object: object.to_owned(), registered_at: now };
            state.apps.insert(registration_id.clone(), (entry.clone(), text));
            entry
        })?;
        Ok(app_registration(&entry, &text))
    }

    /// The registration with `id`, unless it is unknown or has expired.
    pub fn get_app(&self, id: &str) -> Option<AppRegistration> {
        let state = self.snapshot();
        let (entry, text) = state.apps.get(id)?;
        if expired(entry.registered_at, Utc::now(), self.config.registration_ttl) {
            return None;
        }
        Some(app_registration(entry, text))
    }

    /// Writes the object, applies `update` to a copy of the state, persists
    /// the manifest and only then publishes the new state.
    fn commit<T>(
        &self,
        document: &str,
        update: impl FnOnce(&mut State, &str, Arc<str>) -> T,
    ) -> Result<(T, Arc<str>), StoreError> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let object = self.write_object(document)?;
        let text: Arc<str> = document.into();
        let mut next = (*self.snapshot()).clone();
        let out = update(&mut next, &object, text.clone());
        let manifest = serde_json::to_vec_pretty(&next.manifest())?;
        write_atomic(&self.root.join(MANIFEST), &manifest)?;
        let previous = std::mem::replace(&mut *self.state.write().unwrap_or_else(|e| e.into_inner()), Arc::new(next));
        self.collect_garbage(&previous);
        Ok((out, text))
    }

    fn write_object(&self, document: &str) -> Result<String, StoreError> {
        let hash = format!("{:x}", Sha256::digest(document.as_bytes()));
        let object = format!("objects/{}/{hash}.ttl", &hash[..2]);
        let path = self.root.join(&object);
        if !path.exists() {
            fs::create_dir_all(path.parent().expect("object paths have a parent"))?;
            write_atomic(&path, document.as_bytes())?;
        }
        Ok(object)
    }

    /// Removes objects the previous state referenced and the current one
    /// does not. Failures only leave stray files behind.
    fn collect_garbage(&self, previous: &State) {
        let current = self.snapshot();
        let live: BTreeSet<&str> = current
            .policies
            .values()
            .map(|(e, _)| e.object.as_str())
            .chain(current.apps.values().map(|(e, _)| e.object.as_str()))
            .collect();
        let old = previous.policies.values().map(|(e, _)| &e.object).chain(previous.apps.values().map(|(e, _)| &e.object));
        for object in old {
            if !live.contains(object.as_str()) {
                let _ = fs::remove_file(self.root.join(object));
            }
        }
    }
}

fn expired(at: DateTime<Utc>, now: DateTime<Utc>, ttl: Duration) -> bool {
    let ttl = chrono::Duration::from_std(ttl).unwrap_or(chrono::Duration::MAX);
    at.checked_add_signed(ttl).is_none_or(|end| now >= end)
}

fn policy_record(e: &PolicyEntry, text: &Arc<str>) -> PolicyRecord {
    PolicyRecord {
        data_uri: e.data_uri.clone(),
        policy_document: text.to_string(),
        created_at: e.created_at,
        provenance: e.provenance.clone(),
    }
}

fn app_registration(e: &AppEntry, text: &Arc<str>) -> AppRegistration {
    AppRegistration {
        registration_id: e.registration_id.clone(),
        app_policy_document: text.to_string(),
        registered_at: e.registered_at,
    }
}

fn load(root: &Path, manifest: Manifest) -> Result<State, StoreError> {
    if manifest.version != MANIFEST_VERSION {
        return Err(StoreError::Version(manifest.version));
    }
    let read = |object: &str| -> Result<Arc<str>, StoreError> { Ok(fs::read_to_string(root.join(object))?.into()) };
    let mut state = State::default();
    for e in manifest.policies {
        let text = read(&e.object)?;
        state.policies.insert(e.data_uri.clone(), (e, text));
    }
    for e in manifest.apps {
        let text = read(&e.object)?;
        state.apps.insert(e.registration_id.clone(), (e, text));
    }
    Ok(state)
}

/// Write to a sibling temporary file, sync, then rename over `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("file");
    let tmp = path.with_file_name(format!(".{name}.{:016x}.tmp", rand::random::<u64>()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
