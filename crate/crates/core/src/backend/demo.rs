//! Handlers for the example bots shipped in `bots/`.

use super::{BackendError, BackendRegistry, BackendRequest, BackendResult};

pub const DEMO_SSN: &str = "1234";
pub const DEMO_BIRTHDAY: &str = "1990-01-01";
pub const DEMO_EMAIL: &str = "jane.doe@example.com";
pub const DEMO_ZIP: &str = "94105";

const WEATHER: &[(&str, &str, &str)] = &[
    ("94105", "San Francisco", "sunny"),
    ("10001", "New York", "rainy"),
    ("60601", "Chicago", "windy"),
    ("98101", "Seattle", "cloudy"),
];

fn verify(ok: bool) -> BackendResult {
    if ok {
        BackendResult::ok()
    } else {
        BackendResult::fail()
    }
}

pub fn register_demo_handlers(r: &mut BackendRegistry) -> Result<(), BackendError> {
    r.register("verify_ssn", |req: &BackendRequest| match req.entity_name.as_str() {
        "ssn" => verify(req.value == DEMO_SSN),
        "birthday" => verify(req.value == DEMO_BIRTHDAY),
        _ => BackendResult::fail(),
    })?;
    r.register("verify_email", |req: &BackendRequest| verify(req.value == DEMO_EMAIL))?;
    r.register("verify_zip", |req: &BackendRequest| verify(req.value == DEMO_ZIP))?;
    r.register("covid_protocol", |_: &BackendRequest| {
        BackendResult::ok_with("Please wear a mask and arrive 15 minutes early for a temperature check.")
    })?;
    r.register("create_appointment", |req: &BackendRequest| {
        let when = [req.collected.get("appt_date"), req.collected.get("appt_time")];
        match when {
            [Some(d), Some(t)] => BackendResult::ok_with(format!("Your appointment is on {d} at {t}.")),
            _ => BackendResult::ok(),
        }
    })?;
    r.register("weather", |req: &BackendRequest| {
        match WEATHER.iter().find(|(zip, _, _)| *zip == req.value) {
            Some((zip, city, sky)) => BackendResult::ok_with(format!("the weather in {zip}, {city} is {sky}")),
            None => BackendResult::ok_with(format!("I have no forecast for {}", req.value)),
        }
    })?;
    r.register("order_status", |req: &BackendRequest| {
        BackendResult::ok_with(format!("Order {} has shipped and will arrive on Friday.", req.value))
    })?;
    r.register("update_order", |req: &BackendRequest| {
        BackendResult::ok_with(format!("Order {} now ships to your new address.", req.value))
    })?;
    r.register("book_flight", |_: &BackendRequest| BackendResult::ok_with("Your flight is booked."))?;
    Ok(())
}
