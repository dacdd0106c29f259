app_name = "needstack"
app_title = "Needstack"
app_publisher = "Ahmad Hussnain"
app_description = "Needs detection for crisis tweets: top-needs ranking and who-needs-what extraction"
app_email = "ahmadhussnain787@gmail.com"
app_license = "mit"

# Pipeline
# ------------------

# stages chained by `needstack pipeline`, in order; each name is a subcommand
pipeline_stages = ["ingest", "mine-phrases", "annotate", "train", "top-needs"]

# intermediate artifacts kept in the pipeline work directory, one per stage
pipeline_artifacts = {
	"ingest": "corpus.tsv",
	"mine-phrases": "phrases.tsv",
	"annotate": "annotated.tsv",
	"train": "model.bin",
}
