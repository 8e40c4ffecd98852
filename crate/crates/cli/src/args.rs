use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "dvc", version, about = "Dataset composition along dimensions of variation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Task specification files
    #[command(subcommand)]
    Spec(SpecCmd),
    /// Procedural generation
    #[command(subcommand)]
    Gen(GenCmd),
    /// Validate a record file and report its size
    Ingest(IngestArgs),
    /// Compute per-demo annotations
    Annotate(AnnotateArgs),
    /// Measure per-DV supports of a corpus
    Profile(ProfileArgs),
    /// Classify a target/co-training pair along one DV
    Classify(ClassifyArgs),
    /// Retrieve demos matching a query
    Retrieve(RetrieveArgs),
    /// Emit omega-weighted co-training batches
    SampleBatches(SampleArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum SpecCmd {
    /// Parse and check one or more .mlspec files
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the canonical form of a spec
    Fmt { file: PathBuf },
    /// Draw concrete task instances
    Sample {
        file: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Number of instances; instance i uses seed + i
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TextureField {
    Object,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum GenCmd {
    /// Enumerate task instances over lab configurations
    Instances {
        /// JSON array of lab configurations (default: the eight built-in labs)
        #[arg(long)]
        labs: Option<PathBuf>,
        /// List every base instance instead of counts only
        #[arg(long)]
        list: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Render a fractal texture from a spec's texture range
    Texture {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "object")]
        field: TextureField,
        #[arg(long, default_value_t = 64)]
        width: usize,
        #[arg(long, default_value_t = 64)]
        height: usize,
        #[arg(long)]
        seed: u64,
        /// Raw HSV raster output
        #[arg(long)]
        out: PathBuf,
        /// Optional RGB pixmap for viewing
        #[arg(long)]
        ppm: Option<PathBuf>,
    },
    /// Re-anchor a source demo's segments and stitch new demos
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Record file holding the source demo
    #[arg(long)]
    pub demos: PathBuf,
    /// Id of the source demo (default: first record)
    #[arg(long)]
    pub id: Option<String>,
    /// Goal primitives, e.g. "pick place"
    #[arg(long)]
    pub goal: String,
    /// Number of demos to synthesize
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Anchors are shifted uniformly within +-this many meters in x and y
    #[arg(long, default_value_t = 0.05)]
    pub translate: f64,
    /// Anchors are rotated uniformly within +-this many degrees about z
    #[arg(long, default_value_t = 0.0)]
    pub yaw: f64,
    #[arg(long, default_value_t = 0.01)]
    pub bridge_step: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    pub file: PathBuf,
    /// Rewrite the validated records here
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnnotateArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Offline color table: JSON object mapping demo id to color word
    #[arg(long)]
    pub colors: Option<PathBuf>,
    /// Camera bin table (JSON)
    #[arg(long)]
    pub bins: Option<PathBuf>,
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true)]
    pub table_center: Option<Vec<f64>>,
    /// Word-vector table (word then components per line)
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Cosine-distance cut for object clustering
    #[arg(long)]
    pub cluster_cut: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct ProfileOpts {
    /// Cell placed around each observed position (m)
    #[arg(long)]
    pub cell: Option<f64>,
    /// Angular window placed around each camera direction (deg)
    #[arg(long)]
    pub angular_cell: Option<f64>,
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true)]
    pub table_center: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub opts: ProfileOpts,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Target records (.jsonl) or profile (.json)
    #[arg(long)]
    pub target: PathBuf,
    /// Co-training records (.jsonl) or profile (.json)
    #[arg(long)]
    pub cotrain: PathBuf,
    /// camPose, objTex, tableTex, objSpat, recepSpat, motion or scene
    #[arg(long)]
    pub dv: String,
    #[arg(long)]
    pub rho: Option<f64>,
    /// For camPose, compare continuous angular windows instead of bins
    #[arg(long)]
    pub angular: bool,
    #[command(flatten)]
    pub opts: ProfileOpts,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct RetrieveArgs {
    /// Annotated record file
    pub corpus: PathBuf,
    /// File of (query ...) forms
    #[arg(long, conflicts_with = "query_text", required_unless_present = "query_text")]
    pub query: Option<PathBuf>,
    /// Inline query text
    #[arg(long)]
    pub query_text: Option<String>,
    /// Override campose tolerances
    #[arg(long, num_args = 3, value_names = ["DX", "DY", "DZ"], allow_negative_numbers = true)]
    pub campose_tol: Option<Vec<f64>>,
    /// Override objspat cuboid extents
    #[arg(long, num_args = 3, value_names = ["EX", "EY", "EZ"], allow_negative_numbers = true)]
    pub objspat_extent: Option<Vec<f64>>,
    /// Print stage counts instead of ids
    #[arg(long)]
    pub report: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Target ids, one per line
    #[arg(long)]
    pub target: PathBuf,
    /// Co-training ids, one per line
    #[arg(long)]
    pub cotrain: PathBuf,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    #[arg(long)]
    pub seed: u64,
    /// Print the empirical composition instead of the batches
    #[arg(long)]
    pub stats: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}
