pub mod model_doc;
pub mod report;
