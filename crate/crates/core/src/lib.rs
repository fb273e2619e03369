pub mod belief;
pub mod channel;
pub mod error;
pub mod policy;
pub mod sim;
