pub mod syntax;
pub mod template;
pub mod fix_parser;
pub mod metrics;
pub mod abstraction;
pub mod matcher;
pub mod miner;
pub mod patcher;
