#include "deid/synth.hpp"

#include <array>
#include <cstdio>
#include <string_view>

#include "deid/random.hpp"

namespace deid::synth {
namespace {

using Names = std::vector<std::string_view>;

const Names kFemale = {"Jane", "Mary", "Linda", "Susan", "Karen", "Emily", "Sarah", "Laura", "Anna", "Grace"};
const Names kMale = {"John", "James", "Robert", "Michael", "David", "William", "Thomas", "Daniel", "Peter", "George"};
const Names kLast = {"Doe",    "Smith",  "Johnson", "Miller", "Davis",    "Wilson", "Taylor",
                     "Anderson", "Clark", "Lewis",  "Walker", "Robinson", "Harris", "Hopkins"};
const Names kFemaleOov = {"Zorana", "Tamsin", "Oriel", "Brisa", "Yolotli"};
const Names kMaleOov = {"Quillon", "Bexley", "Thorvald", "Caius", "Eamon"};
const Names kLastOov = {"Quarrington", "Halvorsen", "Przybylski", "Vantreese", "Okafor", "Lindqvist"};
const Names kProfessions = {"nurse", "teacher", "engineer", "accountant", "electrician", "farmer", "lawyer",
                            "pharmacist"};

struct CityInfo {
  std::string_view city;
  std::string_view state;
  std::string_view zip_prefix;
};
const std::array<CityInfo, 8> kCities = {{{"Memphis", "TN", "381"},
                                          {"Boston", "MA", "021"},
                                          {"Denver", "CO", "802"},
                                          {"Austin", "TX", "787"},
                                          {"Seattle", "WA", "981"},
                                          {"Portland", "OR", "972"},
                                          {"Chicago", "IL", "606"},
                                          {"Phoenix", "AZ", "850"}}};

const Names kHospitals = {"Memphis General Hospital", "Riverside Medical Center", "John Hopkins Hospital",
                          "Lakeview Clinic", "Saint Luke Hospital"};
const Names kOrganizations = {"Acme Corporation", "Globex", "Initech", "Umbrella Pharmaceuticals"};
const Names kCountries = {"Canada", "Mexico", "France", "Japan", "Brazil", "Kenya"};
const Names kStreets = {"Oak", "Maple", "Cedar", "Elm", "Pine", "Lincoln", "Washington", "Hill"};
const Names kStreetKinds = {"Street", "Avenue", "Road", "Lane", "Drive"};
const Names kDiseases = {"hypertension", "asthma", "breast cancer", "T2DM", "Parkinson's", "chronic kidney disease"};
const Names kMonths = {"January", "February", "March",     "April",   "May",      "June",
                       "July",    "August",   "September", "October", "November", "December"};

const Names kFiller = {
    "No acute distress.",
    "Lungs clear to auscultation bilaterally.",
    "Continue metformin 500 mg twice daily.",
    "Blood pressure was 128/82 mmHg and heart rate 76 bpm.",
    "Abdomen soft, non-tender, non-distended.",
    "Reports mild fatigue but no chest pain or dyspnea.",
    "Labs reviewed: hemoglobin 13.2 g/dL, creatinine 0.9 mg/dL.",
    "Plan discussed and questions answered.",
    "Medication list reconciled; no new allergies reported.",
    "Follow up in 6 weeks or sooner if symptoms worsen.",
    "Neurological exam is grossly intact.",
    "Encouraged regular exercise and a low sodium diet.",
    "Skin warm and dry without rash.",
    "Denies fever, chills or night sweats.",
};

struct Patient {
  std::string id;
  std::string first;
  std::string last;
  bool female = true;
  int age = 0;
  std::size_t city = 0;
  std::string_view profession;
};

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[rng.below(v.size())];
}

std::string digits(Rng& rng, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + rng.below(10)));
  return s;
}

std::string two(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

std::string random_date(Rng& rng) {
  static const std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const int y = static_cast<int>(rng.between(1998, 2023));
  const int m = static_cast<int>(rng.between(1, 12));
  const int d = static_cast<int>(rng.between(1, kDays[m - 1]));
  const std::string month(kMonths[m - 1]);
  switch (rng.below(6)) {
    case 0: return two(m) + "/" + two(d) + "/" + std::to_string(y);
    case 1: return std::to_string(y) + "-" + two(m) + "-" + two(d);
    case 2: return two(d) + month.substr(0, 3) + std::to_string(y);
    case 3: return month + " " + std::to_string(d) + ", " + std::to_string(y);
    case 4: return two(d) + "-" + month.substr(0, 3) + "-" + std::to_string(y);
    default: return std::to_string(m) + "/" + std::to_string(d) + "/" + two(y % 100);
  }
}

class NoteBuilder {
 public:
  explicit NoteBuilder(std::string doc_id) : doc_id_(std::move(doc_id)) {}

  NoteBuilder& text(std::string_view s) {
    out_ += s;
    return *this;
  }
  NoteBuilder& phi(std::string_view s, Label label) {
    gold_.push_back({doc_id_, {out_.size(), out_.size() + s.size()}, label});
    out_ += s;
    return *this;
  }

  std::size_t size() const { return out_.size(); }
  std::string take_text() { return std::move(out_); }
  std::vector<Annotation> take_gold() { return std::move(gold_); }

 private:
  std::string doc_id_;
  std::string out_;
  std::vector<Annotation> gold_;
};

Patient make_patient(Rng& rng, std::size_t index, double oov_rate) {
  Patient p;
  char buf[32];
  std::snprintf(buf, sizeof buf, "P%04zu", index);
  p.id = buf;
  p.female = rng.below(2) == 0;
  const bool oov_first = rng.uniform() < oov_rate;
  const bool oov_last = rng.uniform() < oov_rate;
  if (p.female) p.first = pick(rng, oov_first ? kFemaleOov : kFemale);
  else p.first = pick(rng, oov_first ? kMaleOov : kMale);
  p.last = pick(rng, oov_last ? kLastOov : kLast);
  p.age = static_cast<int>(rng.between(1, 95));
  p.city = rng.below(kCities.size());
  p.profession = pick(rng, kProfessions);
  return p;
}

void write_note(NoteBuilder& b, Rng& rng, const Patient& p, std::size_t target_bytes) {
  const CityInfo& city = kCities[p.city];
  const std::string_view pronoun = p.female ? "She" : "He";
  const std::string full = p.first + " " + p.last;

  b.text("Name: ").phi(full, Label::Patient).text("\n");
  if (rng.below(2) == 0) {
    b.phi(full, Label::Patient).text(" is a ").phi(std::to_string(p.age) + "-year-old", Label::Age).text(" ");
    b.phi(p.profession, Label::Profession).text(" from ").phi(city.city, Label::City).text(". ");
  } else {
    b.text("The patient is a ").phi(std::to_string(p.age), Label::Age).text(" y.o. ");
    b.text(p.female ? "woman" : "man").text(" who works as a ").phi(p.profession, Label::Profession).text(". ");
  }

  // Optional sentences, each included with probability 1/2 in a fixed order.
  if (rng.below(2)) {
    b.phi(p.first, Label::Patient).text(" was seen on ").phi(random_date(rng), Label::Date).text(" at ");
    b.phi(pick(rng, kHospitals), Label::Hospital).text(". ");
  }
  if (rng.below(2)) {
    const bool oov = rng.uniform() < 0.5;
    b.text("Attending physician: Dr. ").phi(pick(rng, oov ? kLastOov : kLast), Label::Doctor).text(". ");
  }
  if (rng.below(2)) b.text("MRN: ").phi(digits(rng, 7), Label::Id).text(". ");
  if (rng.below(2)) {
    b.text("Phone: ").phi("(" + digits(rng, 3) + ") " + digits(rng, 3) + "-" + digits(rng, 4), Label::Phone).text(". ");
  }
  if (rng.below(2)) {
    const std::string street = std::to_string(rng.between(1, 9999)) + " " + std::string(pick(rng, kStreets)) + " " +
                               std::string(pick(rng, kStreetKinds));
    b.text("Address: ").phi(street, Label::Street).text(", ").phi(city.city, Label::City).text(", ");
    b.text(city.state).text(" ").phi(std::string(city.zip_prefix) + digits(rng, 2), Label::Zip).text(". ");
  }
  if (rng.below(2)) {
    std::string user(1, static_cast<char>(p.first[0] - 'A' + 'a'));
    for (char c : p.last) user.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    b.text("Email: ").phi(user + "@example.org", Label::Contact).text(". ");
  }
  if (rng.below(2)) {
    const std::string month(pick(rng, kMonths));
    b.phi(p.first, Label::Patient).text(" was diagnosed with ").text(pick(rng, kDiseases)).text(" in ");
    b.phi(month + " " + std::to_string(rng.between(2000, 2023)), Label::Date).text(". ");
  }
  if (rng.below(2)) {
    b.text(p.female ? "Ms. " : "Mr. ").phi(p.last, Label::Patient).text(" reports feeling better. ");
  }
  if (rng.below(2)) b.text(pronoun).text(" works for ").phi(pick(rng, kOrganizations), Label::Organization).text(". ");
  if (rng.below(2)) b.text(pronoun).text(" recently travelled to ").phi(pick(rng, kCountries), Label::Country).text(". ");
  if (rng.below(2)) b.text(pronoun).text(" has a history of ").text(pick(rng, kDiseases)).text(". ");
  if (rng.below(2)) b.text("Next appointment: ").phi(random_date(rng), Label::Date).text(".");
  b.text("\n");

  while (b.size() < target_bytes) {
    b.text(pick(rng, kFiller));
    b.text(rng.below(6) == 0 ? "\n" : " ");
  }
}

}  // namespace

Corpus generate_corpus(std::size_t documents, std::uint64_t seed, const Options& options) {
  Corpus corpus;
  Rng patients_rng(keyed_hash(seed, "synth", "patients"));
  const std::size_t per = options.docs_per_patient == 0 ? 1 : options.docs_per_patient;
  const std::size_t n_patients = documents == 0 ? 0 : (documents + per - 1) / per;
  std::vector<Patient> patients;
  patients.reserve(n_patients);
  for (std::size_t i = 0; i < n_patients; ++i) patients.push_back(make_patient(patients_rng, i, options.oov_rate));

  for (std::size_t i = 0; i < documents; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "note_%05zu.txt", i);
    Rng rng(keyed_hash(seed, "synth-doc", buf));
    const Patient& p = patients[rng.below(patients.size())];
    NoteBuilder b(buf);
    write_note(b, rng, p, options.target_bytes);
    Document doc;
    doc.id = buf;
    doc.patient_id = p.id;
    doc.text = b.take_text();
    auto gold = b.take_gold();
    corpus.gold.insert(corpus.gold.end(), gold.begin(), gold.end());
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace deid::synth
