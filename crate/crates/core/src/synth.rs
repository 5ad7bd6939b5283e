//! Deterministic generator for a small labeled email corpus. It backs the
//! bundled desk corpus and test fixtures; it is not a substitute for real
//! mail data.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{dedup_key, DatasetRecord};
use crate::{Error, Result};

pub const SOURCE_CORPORATE: &str = "synth_corporate";
pub const SOURCE_CONSUMER: &str = "synth_consumer";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    pub phishing_fraction: f64,
    pub seed: u64,
    /// Share of emails drawn from the look-alike templates of the other class.
    pub hard_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { n: 6000, phishing_fraction: 0.5, seed: 7, hard_fraction: 0.06 }
    }
}

const FIRST: &[&str] = &[
    "Alice", "Brian", "Chen", "Dana", "Elena", "Farid", "Grace", "Hiro", "Ines", "Jonas", "Kara", "Liam", "Maya",
    "Nikhil", "Olga", "Pedro", "Quinn", "Rosa", "Sam", "Tara", "Umar", "Vera", "Wei", "Yusuf", "Zoe",
];
const LAST: &[&str] = &[
    "Adams", "Baker", "Costa", "Dubois", "Evans", "Fischer", "Garcia", "Hansen", "Ito", "Jensen", "Kim", "Lopez",
    "Moreau", "Novak", "Okafor", "Patel", "Rossi", "Schmidt", "Tanaka", "Weber",
];
const COMPANIES: &[&str] = &["northwind", "contoso", "fabrikam", "globex", "initech", "umbrella", "acme", "vandelay"];
const PROJECTS: &[&str] = &[
    "Atlas", "Beacon", "Cobalt", "Delta", "Ember", "Falcon", "Granite", "Harbor", "Iris", "Juniper", "Keystone",
    "Lumen",
];
const DAYS: &[&str] = &["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "tomorrow", "next week"];
const ROOMS: &[&str] = &[
    "conference room B", "the main conference room", "room 4.12", "the large meeting room", "conference room 2",
    "the third floor lounge", "the boardroom", "conference room A", "the small conference room",
];
const TOPICS: &[&str] = &[
    "the quarterly budget", "the hiring plan", "the release schedule", "the vendor contract", "the design review",
    "the customer feedback", "the migration plan", "the onboarding guide", "the team offsite", "the roadmap",
];
const BRANDS: &[(&str, &str)] = &[
    ("PayPal", "paypal"), ("Amazon", "amazon"), ("Apple", "apple"), ("Microsoft", "microsoft"),
    ("Netflix", "netflix"), ("Chase", "chase"), ("DHL", "dhl"), ("Wells Fargo", "wellsfargo"),
];
const BAD_TLDS: &[&str] = &["tk", "ml", "xyz", "top", "gq", "info", "ru"];
const PRIZES: &[&str] = &[
    "$1,000,000", "$5,000", "a new iPhone", "a $500 gift card", "an all-expenses-paid cruise", "$250,000",
    "a brand new car", "1 BTC",
];
const ITEMS: &[&str] = &[
    "wireless headphones", "a desk lamp", "running shoes", "a coffee grinder", "a phone case", "a backpack",
    "garden tools", "a novel",
];

struct Ctx<'a> {
    rng: &'a mut ChaCha8Rng,
}

impl Ctx<'_> {
    fn pick<'b>(&mut self, items: &[&'b str]) -> &'b str {
        items.choose(self.rng).copied().unwrap_or("")
    }

    fn brand(&mut self) -> (&'static str, &'static str) {
        *BRANDS.choose(self.rng).unwrap_or(&BRANDS[0])
    }

    fn person(&mut self) -> String {
        let f = self.pick(FIRST);
        let l = self.pick(LAST);
        format!("{f} {l}")
    }

    fn time(&mut self) -> String {
        let h = self.rng.random_range(1..=11);
        let half = if self.rng.random_bool(0.3) { ":30" } else { "" };
        let ampm = if h >= 8 && self.rng.random_bool(0.6) { "AM" } else { "PM" };
        format!("{h}{half} {ampm}")
    }

    fn number(&mut self, lo: u32, hi: u32) -> u32 {
        self.rng.random_range(lo..=hi)
    }

    fn phish_url(&mut self, brand_key: &str) -> String {
        let n = self.number(10, 999);
        match self.number(0, 4) {
            0 => format!("http://{}.{}.{}.{}/{brand_key}/login", self.number(11, 223), self.number(0, 255), self.number(0, 255), self.number(1, 254)),
            1 => format!("http://{brand_key}-secure-{n}.{}/verify", self.pick(BAD_TLDS)),
            2 => {
                let typo = typo(brand_key, self.rng);
                format!("https://{typo}.com/account/update?id={n}")
            }
            3 => format!("http://secure-login{n}.{}/{brand_key}/signin", self.pick(BAD_TLDS)),
            _ => format!("http://{brand_key}.account-check{n}.{}/confirm", self.pick(BAD_TLDS)),
        }
    }

    fn legit_url(&mut self, company: &str) -> String {
        let p = self.pick(&["wiki", "docs", "calendar", "intranet", "portal"]);
        let n = self.number(100, 9999);
        format!("https://{p}.{company}.com/pages/{n}")
    }
}

fn typo(brand: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = brand.chars().collect();
    let i = rng.random_range(0..chars.len());
    chars[i] = match chars[i] {
        'a' => '4',
        'e' => '3',
        'i' | 'l' => '1',
        'o' => '0',
        _ => 'x',
    };
    chars.into_iter().collect()
}

type Template = fn(&mut Ctx) -> (String, String);

fn legit_meeting(c: &mut Ctx) -> (String, String) {
    let day = c.pick(DAYS);
    let time = c.time();
    let room = c.pick(ROOMS);
    let topic = c.pick(TOPICS);
    let subject = format!("Meeting {day} at {time}");
    let body = match c.number(0, 5) {
        0 => format!("Meeting scheduled for {day} at {time} in {room}. We will go over {topic}."),
        1 => format!("Hi team, the meeting about {topic} moved to {day} at {time}. Same place, {room}."),
        2 => format!("Reminder: our weekly meeting is {day} at {time} in {room}. Please bring notes on {topic}."),
        3 => format!("Can we meet {day} at {time}? I booked {room} for an hour to discuss {topic}."),
        4 => format!("The conference call on {topic} starts {day} at {time}. Dial in from {room} or join remotely."),
        _ => format!("Agenda for the meeting {day} at {time}: {topic}, open questions, next steps. Room: {room}."),
    };
    if c.rng.random_bool(0.4) {
        let company = c.pick(COMPANIES);
        let url = c.legit_url(company);
        return (subject, format!("{body} Calendar invite: {url}"));
    }
    (subject, body)
}

fn legit_project(c: &mut Ctx) -> (String, String) {
    let project = c.pick(PROJECTS);
    let topic = c.pick(TOPICS);
    let company = c.pick(COMPANIES);
    let url = c.legit_url(company);
    let n = c.number(2, 14);
    let subject = format!("Project {project} update");
    let body = match c.number(0, 2) {
        0 => format!("Quick update on {project}: we closed {n} tickets this sprint. Notes on {topic} are in {url}, more at the next meeting."),
        1 => format!("The {project} draft is ready for review. The deadline for comments on {topic} is {}, as soon as possible is better.", c.pick(DAYS)),
        _ => format!("Attached are the slides from the {project} review meeting. Let me know if anything about {topic} looks off."),
    };
    (subject, body)
}

fn legit_event(c: &mut Ctx) -> (String, String) {
    let day = c.pick(DAYS);
    let time = c.time();
    let topic = c.pick(TOPICS);
    let city = c.pick(&["Lisbon", "Berlin", "Austin", "Toronto", "Osaka", "Nairobi"]);
    let subject = String::from(c.pick(&["Conference travel", "Conference schedule", "Speaker notes", "Workshop"]));
    let body = match c.number(0, 2) {
        0 => format!("The conference in {city} opens {day} at {time}. Our talk on {topic} is in the afternoon session."),
        1 => format!("Registration for the annual conference closes {day}. Send me your session picks so I can book seats."),
        _ => format!("Workshop notes from the conference are up. The keynote on {topic} started at {time} and ran long."),
    };
    (subject, body)
}

fn legit_social(c: &mut Ctx) -> (String, String) {
    let day = c.pick(DAYS);
    let time = c.time();
    let place = c.pick(&["the cafe downstairs", "the pizza place", "the park", "the usual spot", "the kitchen"]);
    let subject = String::from(c.pick(&["Lunch?", "Team lunch", "Coffee", "Friday plans", "Birthday cake"]));
    let body = match c.number(0, 2) {
        0 => format!("Anyone up for lunch {day} after the team meeting? Thinking {place} around {time}."),
        1 => format!("We are celebrating in {place} {day} at {time}. Cake for everyone, see you there!"),
        _ => format!("Coffee {day} at {time} at {place}? I would love to hear how the new role is going."),
    };
    (subject, body)
}

fn legit_hr(c: &mut Ctx) -> (String, String) {
    let company = c.pick(COMPANIES);
    let url = c.legit_url(company);
    let day = c.pick(DAYS);
    let subject = String::from(c.pick(&["Policy update", "Benefits enrollment", "Office closure", "Training session"]));
    let body = match c.number(0, 2) {
        0 => format!("The updated travel policy is on the intranet at {url}. Nothing changes for trips already booked."),
        1 => {
            let time = c.time();
            format!("The office will close early {day} at {time} for maintenance. Remote work is fine that afternoon.")
        }
        _ => {
            let time = c.time();
            let room = c.pick(ROOMS);
            format!("Training on the new expense tool runs {day} at {time} in {room}. Slides will be shared afterwards.")
        }
    };
    (subject, body)
}

fn legit_order(c: &mut Ctx) -> (String, String) {
    let (brand, key) = c.brand();
    let item = c.pick(ITEMS);
    let n = c.number(100000, 999999);
    let day = c.pick(DAYS);
    let subject = format!("Your {brand} order {n} has shipped");
    let body = match c.number(0, 1) {
        0 => format!("Good news, {item} is on its way and should arrive {day}. Track it at https://www.{key}.com/orders/{n}."),
        _ => format!("Thanks for shopping with {brand}. Order {n} ({item}) shipped today. Delivery expected {day}."),
    };
    (subject, body)
}

fn legit_newsletter(c: &mut Ctx) -> (String, String) {
    let (brand, key) = c.brand();
    let item = c.pick(ITEMS);
    let n = c.number(10, 60);
    let subject = format!("{brand} weekly picks");
    let body = match c.number(0, 2) {
        0 => format!("New this week: {item} and more, {n}% off through Sunday. Browse at https://www.{key}.com/deals. To unsubscribe click here."),
        1 => format!("Free shipping on {item} this month. Manage your email preferences at https://www.{key}.com/preferences."),
        _ => format!("Thanks for being a member. Your monthly reading list and {item} reviews are below."),
    };
    (subject, body)
}

fn legit_admin(c: &mut Ctx) -> (String, String) {
    let project = c.pick(PROJECTS);
    let day = c.pick(DAYS);
    let time = c.time();
    let amount = c.number(200, 9000);
    let subject = String::from(c.pick(&["Expense reports", "Invoice for review", "Budget approval", "FYI: payroll"]));
    let body = match c.number(0, 3) {
        0 => format!("Please submit expense reports for {project} by {day} at {time}. Finance closes the books after that."),
        1 => format!("The vendor invoice for {project} is attached, ${amount} total. Payment is due {day}, can you approve it?"),
        2 => format!("FYI: payroll runs {day}. If your bank details changed, tell HR in person, not by email."),
        _ => format!("The {project} budget request of ${amount} is approved. Please share the PO number with the team ASAP."),
    };
    (subject, body)
}

fn legit_cheer(c: &mut Ctx) -> (String, String) {
    let who = c.pick(FIRST);
    let time = c.time();
    let project = c.pick(PROJECTS);
    let subject = String::from(c.pick(&["Great news!", "Thank you!", "Happy birthday!", "We did it", "Congrats!"]));
    let body = match c.number(0, 4) {
        0 => format!("Happy birthday {who}!!! Cake in the kitchen at {time}!"),
        1 => format!("{project} shipped today! Great job everyone, drinks are on me!"),
        2 => format!("Thank you so much for the flowers! They made my whole week!!"),
        3 => format!("Congrats on the promotion {who}! So well deserved!"),
        _ => format!("We won the {project} pitch!! Huge thanks to {who} for the late nights!"),
    };
    (subject, body)
}

fn legit_personal(c: &mut Ctx) -> (String, String) {
    let day = c.pick(DAYS);
    let time = c.time();
    let who = c.pick(FIRST);
    let subject = String::from(c.pick(&["Dinner", "Weekend", "Photos", "Appointment reminder", "Book club"]));
    let body = match c.number(0, 3) {
        0 => format!("Dinner at our place {day} at {time}? {who} is bringing dessert."),
        1 => format!("Your dental appointment is {day} at {time}. Reply to this message if you need to reschedule."),
        2 => format!("Book club meets {day} at {time}. We are discussing the last three chapters, {who} is hosting."),
        _ => format!("Here are the photos from the weekend! {who} says hello and the kids loved the lake."),
    };
    (subject, body)
}

fn legit_statement(c: &mut Ctx) -> (String, String) {
    let (brand, _) = c.brand();
    let month = c.pick(&["January", "March", "May", "July", "September", "November"]);
    let subject = format!("Your {month} statement");
    let body = format!(
        "Your {month} statement from {brand} is now available in the mobile app. There is nothing you need to do. \
         This message is for your records."
    );
    (subject, body)
}

fn phish_suspend(c: &mut Ctx) -> (String, String) {
    let (brand, key) = c.brand();
    let url = c.phish_url(key);
    let hours = c.pick(&["24", "48", "12"]);
    let subject = format!("{} Your {brand} account", c.pick(&["Urgent:", "Action required:", "Final notice:", "Alert:"]));
    let body = match c.number(0, 3) {
        0 => format!("Your account will be suspended. Click here to verify your account within {hours} hours: {url}"),
        1 => format!("We detected unusual activity on your {brand} account at {hours}:00. Verify your identity immediately at {url} or your account will be locked."),
        2 => format!("Dear customer, your account has been limited. Click the link below and log in to verify your information: {url}"),
        _ => format!("Your {brand} account access expires today. Confirm your password now to avoid suspension: {url}"),
    };
    (subject, body)
}

fn phish_prize(c: &mut Ctx) -> (String, String) {
    let prize = c.pick(PRIZES);
    let key = c.brand().1;
    let url = c.phish_url(key);
    let subject = String::from(c.pick(&["Congratulations!", "You are a winner", "Claim your prize", "You've won!"]));
    let body = match c.number(0, 4) {
        0 => format!("You've won {prize}! Click to claim your prize now! {url}"),
        1 => format!("Congratulations, you've been selected at random to receive {prize}. Claim it today before the offer expires: {url}"),
        2 => format!("Winner notice: {prize} is waiting for you. Click here and enter your bank details to claim the reward. {url}"),
        3 => format!("Lottery result: your email won {prize}. Send your full name and account number to claim your cash prize."),
        _ => format!("{prize} is yours! Claim now! Reply with your name and address!"),
    };
    (subject, body)
}

fn phish_password(c: &mut Ctx) -> (String, String) {
    let company = c.pick(COMPANIES);
    let url = c.phish_url("office365");
    let n = c.number(90, 99);
    let subject = String::from(c.pick(&["Password expiry notice", "Mailbox full", "IT helpdesk: action required", "Security alert"]));
    let body = match c.number(0, 2) {
        0 => format!("Your {company} password expires today. Click here to verify your login and keep your account active: {url}"),
        1 => format!("Your mailbox is at {n}% capacity. Log in immediately to verify your account or incoming mail will be blocked: {url}"),
        _ => format!("We noticed a suspicious sign in on your account. Verify your credentials now to avoid termination: {url}"),
    };
    (subject, body)
}

fn phish_delivery(c: &mut Ctx) -> (String, String) {
    let (brand, key) = c.brand();
    let url = c.phish_url(key);
    let fee = c.number(1, 9);
    let subject = format!("{brand}: delivery problem");
    let body = match c.number(0, 1) {
        0 => format!("You've got a package waiting at our depot. Click here to confirm your address and pay a ${fee}.99 fee: {url}"),
        _ => format!("Shipment on hold. Verify your account details immediately or the parcel will be returned: {url}"),
    };
    (subject, body)
}

fn phish_invoice(c: &mut Ctx) -> (String, String) {
    let who = c.person();
    let amount = c.number(2000, 49000);
    let key = c.brand().1;
    let url = c.phish_url(key);
    let subject = String::from(c.pick(&["Invoice overdue", "Wire transfer needed", "Payment failed", "Refund pending"]));
    let body = match c.number(0, 3) {
        0 => format!("I need you to process a wire transfer of ${amount} today. Keep this confidential. {who}, CEO"),
        1 => format!("Your payment failed at checkout. Update your billing information immediately to keep your account: {url}"),
        2 => format!("You've got a pending refund of ${amount}. Click to verify your bank account and claim it: {url}"),
        _ => format!("Invoice {amount} is overdue and available at the secure link. Sign in to avoid a penalty: {url}"),
    };
    (subject, body)
}

fn phish_pretext(c: &mut Ctx) -> (String, String) {
    let who = c.person();
    let subject = String::from(c.pick(&["Quick favor", "Are you available?", "Document for you", "Re: request"]));
    let body = match c.number(0, 3) {
        0 => format!("Are you available? I need a quick favor and I am stuck in meetings. Reply as soon as you see this. {who}"),
        1 => format!("Please look at the attached document and get back to me today. It is important for the audit. {who}"),
        2 => format!("I need you to buy gift cards for a client today, I will reimburse you. Keep this between us. {who}"),
        _ => format!("Kindly see the attached file and confirm receipt. Open it with your email login to view. {who}"),
    };
    (subject, body)
}

fn phish_short(c: &mut Ctx) -> (String, String) {
    let (brand, _) = c.brand();
    let lead = c.pick(&["Urgent:", "Alert:", "Important:", "Notice:", "Warning:"]);
    let state = c.pick(&["will be suspended", "has been locked", "is on hold", "will be closed", "was limited"]);
    let call = c.pick(&["Click here to verify", "Click the link to confirm", "Verify now", "Click to restore access", "Log in to verify"]);
    let end = c.pick(&[".", "!", "!!", "."]);
    let subject = format!("{brand} security notice");
    (subject, format!("{lead} Your {brand} account {state}. {call}{end}"))
}

// Look-alikes: legitimate mail with phishing vocabulary and the reverse.
fn legit_hard(c: &mut Ctx) -> (String, String) {
    let company = c.pick(COMPANIES);
    let url = c.legit_url(company);
    let subject = String::from(c.pick(&["Welcome aboard", "Confirm your sign up", "New login"]));
    let body = match c.number(0, 2) {
        0 => format!("Thanks for creating an account. Click here to verify your email address and finish sign up: {url}"),
        1 => format!("You signed in from a new laptop. If this was you, there is nothing to do. Details at {url}"),
        _ => format!("Your account setup at {company} is complete. You can update your password any time from {url}"),
    };
    (subject, body)
}

fn phish_hard(c: &mut Ctx) -> (String, String) {
    let day = c.pick(DAYS);
    let key = c.brand().1;
    let url = c.phish_url(key);
    let subject = String::from(c.pick(&["Shared document", "Calendar invite", "Voicemail received"]));
    let body = match c.number(0, 1) {
        0 => format!("A document was shared with you for the meeting {day}. Sign in with your email password to view it: {url}"),
        _ => format!("You have a new voicemail. Log in to listen before it expires: {url}"),
    };
    (subject, body)
}

const LEGIT_CORPORATE: &[Template] =
    &[legit_meeting, legit_meeting, legit_project, legit_social, legit_hr, legit_event, legit_admin, legit_cheer];
const LEGIT_CONSUMER: &[Template] = &[legit_order, legit_personal, legit_statement, legit_meeting, legit_newsletter, legit_cheer];
const PHISH_CORPORATE: &[Template] = &[phish_password, phish_invoice, phish_suspend, phish_short, phish_pretext];
const PHISH_CONSUMER: &[Template] = &[phish_suspend, phish_prize, phish_delivery, phish_invoice, phish_short];

fn render(c: &mut Ctx, phishing: bool, subject: String, body: String) -> String {
    let greeting = if phishing {
        c.pick(&["", "Dear customer,\n", "Dear user,\n", "Hello,\n", "Dear valued member,\n"]).into()
    } else {
        let who = c.pick(FIRST);
        format!("{}\n", c.pick(&["Hi {who},", "Hello {who},", "Hey {who},", "Dear {who},", "Hi all,"]).replace("{who}", who))
    };
    let sign = if phishing {
        String::from(c.pick(&["", "\nSecurity Team", "\nCustomer Service", "\nAccount Department", "\nSupport"]))
    } else {
        let who = c.person();
        format!("\n{}\n{who}", c.pick(&["Thanks,", "Best,", "Cheers,", "Regards,", "See you,", "Thanks!", "Have a great weekend"]))
    };
    let style = c.number(0, 9);
    let text = match (phishing, style) {
        // terse notes without greeting or signature
        (false, 0..=2) => body,
        (true, 0..=2) => {
            let footer = c.pick(&[
                "This is an automated message, please do not reply to this email.",
                "If you do not respond, your access may be interrupted. Thank you for your prompt attention.",
                "Copyright all rights reserved. You received this notice because you hold an account with us.",
                "We apologize for any inconvenience. Our records show this request is still open.",
            ]);
            format!("{greeting}{body}\n\n{footer}{sign}")
        }
        _ => format!("{greeting}{body}{sign}"),
    };
    let text = if phishing && c.rng.random_bool(0.2) {
        let (brand, _) = c.brand();
        let n = c.number(100000, 999999);
        format!(
            "{text}\n\nThis message was sent to you as a registered customer of {brand}. Replies to this mailbox \
             are not monitored. For details about how we handle personal data please read our privacy notice on the \
             official website. Reference number {n}. Do not share this reference with anyone."
        )
    } else if !phishing && c.rng.random_bool(0.25) {
        let day = c.pick(DAYS);
        let who = c.person();
        let previous = LEGIT_CORPORATE.choose(c.rng).copied().unwrap_or(legit_project);
        let (_, quoted) = previous(c);
        format!("{text}\n\nOn {day}, {who} wrote:\n> {quoted}")
    } else if !phishing && c.rng.random_bool(0.15) {
        format!(
            "{text}\n\nThis email and any attachments are confidential and intended solely for the addressee. If you \
             received it in error, please notify the sender and delete it. Views expressed are those of the author."
        )
    } else {
        text
    };
    if c.rng.random_bool(0.35) {
        let company = c.pick(COMPANIES);
        let from = if phishing {
            let key = c.brand().1;
            let n = c.number(1, 99);
            format!("{key} support <no-reply{n}@{key}-alerts.{}>", c.pick(BAD_TLDS))
        } else {
            let f = c.pick(FIRST).to_ascii_lowercase();
            format!("{f} <{f}@{company}.com>")
        };
        let mut headers = format!("From: {from}\nSubject: {subject}\n");
        if phishing && c.rng.random_bool(0.4) {
            let n = c.number(1, 999);
            headers.push_str(&format!("Reply-To: claims{n}@mail-desk.{}\n", c.pick(BAD_TLDS)));
        }
        format!("{headers}\n{text}")
    } else {
        format!("{subject}\n\n{text}").trim_start().into()
    }
}

/// Drops links, leaving the call to action in place.
fn strip_urls(body: &str) -> String {
    let kept: Vec<&str> = body.split(' ').filter(|w| !w.starts_with("http")).collect();
    let mut out = kept.join(" ");
    while out.ends_with([':', ' ']) {
        out.pop();
    }
    if !out.ends_with(['.', '!', '?']) {
        out.push('.');
    }
    out
}

/// Generates `config.n` distinct emails with exactly
/// `round(n * phishing_fraction)` phishing examples.
pub fn generate(config: &SynthConfig) -> Result<Vec<DatasetRecord>> {
    if config.n < 2 || !(0.0..=1.0).contains(&config.phishing_fraction) || !(0.0..=1.0).contains(&config.hard_fraction) {
        return Err(Error::InvalidConfig(String::from("synth needs n >= 2 and fractions in [0, 1]")));
    }
    let n_phish = libm::round(config.n as f64 * config.phishing_fraction) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(config.n);
    let mut counts = [0usize; 2];
    let targets = [config.n - n_phish, n_phish];
    let mut attempts = 0usize;
    while out.len() < config.n {
        attempts += 1;
        if attempts > config.n * 200 {
            return Err(Error::InvalidConfig(String::from("synth could not produce enough distinct emails")));
        }
        let label = usize::from(counts[0] >= targets[0] || (counts[1] < targets[1] && rng.random_bool(0.5)));
        let corporate = rng.random_bool(0.5);
        let hard = rng.random_bool(config.hard_fraction);
        let template: Template = match (label, corporate, hard) {
            (0, _, true) => legit_hard,
            (1, _, true) => phish_hard,
            (0, true, _) => *LEGIT_CORPORATE.choose(&mut rng).unwrap_or(&LEGIT_CORPORATE[0]),
            (0, false, _) => *LEGIT_CONSUMER.choose(&mut rng).unwrap_or(&LEGIT_CONSUMER[0]),
            (_, true, _) => *PHISH_CORPORATE.choose(&mut rng).unwrap_or(&PHISH_CORPORATE[0]),
            _ => *PHISH_CONSUMER.choose(&mut rng).unwrap_or(&PHISH_CONSUMER[0]),
        };
        let mut ctx = Ctx { rng: &mut rng };
        let (subject, mut body) = template(&mut ctx);
        if label == 1 && ctx.rng.random_bool(0.3) {
            body = strip_urls(&body);
        }
        if label == 1 && ctx.rng.random_bool(0.25) {
            let day = ctx.pick(DAYS);
            let tail = ctx.pick(&["This link expires", "Access will end", "Your case closes", "The offer ends"]);
            body = format!("{body} {tail} {day}.");
        }
        if label == 1 && ctx.rng.random_bool(0.3) {
            let push = ctx.pick(&["Act now!", "Don't wait!", "Hurry, this is your last chance!", "Respond today!"]);
            body = format!("{body} {push}");
        }
        if label == 1 && ctx.rng.random_bool(0.02) {
            body = body.to_uppercase();
        } else if label == 0 && ctx.rng.random_bool(0.04) {
            let notice = ctx.pick(&[
                "PLEASE NOTE THE NEW PARKING RULES START ON MONDAY.",
                "REMINDER: BADGES MUST BE VISIBLE AT ALL TIMES.",
                "OFFICE CLOSED FOR THE HOLIDAY, NO DELIVERIES THAT DAY.",
            ]);
            body = format!("{body}\n{notice}");
        } else if label == 1 && ctx.rng.random_bool(0.06) {
            let shout = ctx.pick(&["URGENT:", "IMPORTANT NOTICE:", "ATTENTION:", "ACTION REQUIRED:", "FINAL WARNING:", "SECURITY ALERT:"]);
            body = format!("{shout} {body}");
        }
        let text = render(&mut ctx, label == 1, subject, body);
        if !seen.insert(dedup_key(&text)) {
            continue;
        }
        counts[label] += 1;
        out.push(DatasetRecord {
            text,
            label: label as u8,
            source: String::from(if corporate { SOURCE_CORPORATE } else { SOURCE_CONSUMER }),
        });
    }
    Ok(out)
}
