#include "orthomart/models.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace orthomart {

std::string to_string(LawKind kind) {
  switch (kind) {
    case LawKind::rademacher: return "rademacher";
    case LawKind::gaussian: return "gaussian";
    case LawKind::uniform: return "uniform";
  }
  return "unknown";
}

LawKind law_kind_from_string(const std::string& name) {
  if (name == "rademacher") return LawKind::rademacher;
  if (name == "gaussian") return LawKind::gaussian;
  if (name == "uniform" || name == "uniform-centered") return LawKind::uniform;
  throw std::invalid_argument("unknown innovation law '" + name + "'");
}

InnovationLaw::InnovationLaw(LawKind kind, double sigma2) : kind_(kind), sigma2_(sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("innovation variance must be positive and finite");
  }
}

double InnovationLaw::fourth_moment() const {
  const double s4 = sigma2_ * sigma2_;
  switch (kind_) {
    case LawKind::rademacher: return s4;
    case LawKind::gaussian: return 3.0 * s4;
    case LawKind::uniform: return 1.8 * s4;
  }
  return s4;
}

double InnovationLaw::draw(CounterRng& rng) const {
  const double sigma = std::sqrt(sigma2_);
  switch (kind_) {
    case LawKind::rademacher: return (rng() & 1u) ? sigma : -sigma;
    case LawKind::gaussian: return sigma * rng.standard_normal();
    case LawKind::uniform: return std::sqrt(3.0) * sigma * (2.0 * rng.uniform_open() - 1.0);
  }
  return 0.0;
}

LinearKernel::LinearKernel(std::size_t dim, std::vector<Entry> entries) : dim_(dim) {
  for (const auto& e : entries) {
    if (e.lag.dim() != dim) throw DimensionMismatch("kernel lag " + e.lag.to_string());
    if (!leq(MultiIndex(dim, 0), e.lag)) {
      throw std::invalid_argument("linear kernel lag " + e.lag.to_string() + " is not >= 0");
    }
    if (!std::isfinite(e.coef)) throw std::invalid_argument("non-finite kernel coefficient");
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.lag < b.lag; });
  for (auto& e : entries) {
    if (!entries_.empty() && entries_.back().lag == e.lag) {
      entries_.back().coef += e.coef;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.coef == 0.0; });
}

LinearKernel LinearKernel::scaled(double s) const {
  std::vector<Entry> out = entries_;
  for (auto& e : out) e.coef *= s;
  return LinearKernel(dim_, std::move(out));
}

VolterraKernel::VolterraKernel(std::size_t dim, std::vector<Entry> entries) : dim_(dim) {
  const MultiIndex zero(dim, 0);
  for (const auto& e : entries) {
    if (e.u.dim() != dim || e.v.dim() != dim) {
      throw DimensionMismatch("kernel pair " + e.u.to_string() + "|" + e.v.to_string());
    }
    if (!leq(zero, e.u) || !leq(zero, e.v)) {
      throw std::invalid_argument("Volterra lags must be >= 0: " + e.u.to_string() + "|" +
                                  e.v.to_string());
    }
    if (e.u == e.v) {
      throw std::invalid_argument("Volterra diagonal entry " + e.u.to_string() +
                                  " is not allowed (a_{u,u} = 0)");
    }
    if (!std::isfinite(e.coef)) throw std::invalid_argument("non-finite kernel coefficient");
  }
  auto key_less = [](const Entry& a, const Entry& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  };
  std::stable_sort(entries.begin(), entries.end(), key_less);
  for (auto& e : entries) {
    if (!entries_.empty() && entries_.back().u == e.u && entries_.back().v == e.v) {
      entries_.back().coef += e.coef;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.coef == 0.0; });
}

FieldModel::FieldModel(Kernel kernel, InnovationLaw law)
    : kernel_(std::move(kernel)), law_(law) {
  dim_ = std::visit([](const auto& k) { return k.dim(); }, kernel_);
  max_lag_ = MultiIndex(dim_, 0);
  if (const auto* lin = std::get_if<LinearKernel>(&kernel_)) {
    for (const auto& e : lin->entries()) max_lag_ = join(max_lag_, e.lag);
  } else {
    for (const auto& e : std::get<VolterraKernel>(kernel_).entries()) {
      max_lag_ = join(max_lag_, join(e.u, e.v));
    }
  }
}

const LinearKernel& FieldModel::linear() const {
  if (const auto* k = std::get_if<LinearKernel>(&kernel_)) return *k;
  throw std::logic_error("model is not linear");
}

const VolterraKernel& FieldModel::volterra() const {
  if (const auto* k = std::get_if<VolterraKernel>(&kernel_)) return *k;
  throw std::logic_error("model is not Volterra");
}

Rectangle::Rectangle(MultiIndex upper) : upper_(upper) {
  for (auto c : upper_.coords()) {
    if (c < 1) throw std::invalid_argument("rectangle " + upper_.to_string() + " must be >= 1");
  }
}

std::string Rectangle::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (i) s += 'x';
    s += std::to_string(upper_[i]);
  }
  return s;
}

namespace {

std::size_t kernel_size(const FieldModel& model) {
  return model.is_linear() ? model.linear().entries().size()
                           : model.volterra().entries().size();
}

void append_terms(const FieldModel& model, const MultiIndex& k,
                  std::vector<Expansion::Term>& out) {
  if (model.is_linear()) {
    for (const auto& e : model.linear().entries()) out.emplace_back(Monomial(k - e.lag), e.coef);
  } else {
    for (const auto& e : model.volterra().entries()) {
      out.emplace_back(Monomial(k - e.u, k - e.v), e.coef);
    }
  }
}

}  // namespace

Expansion term_expansion(const FieldModel& model, const MultiIndex& k) {
  require_same_dim(model.max_lag(), k);
  std::vector<Expansion::Term> terms;
  append_terms(model, k, terms);
  return Expansion(std::move(terms));
}

Expansion partial_sum(const FieldModel& model, const Rectangle& rect, std::size_t budget) {
  require_same_dim(model.max_lag(), rect.upper());
  const auto generated = static_cast<double>(rect.cells()) * static_cast<double>(kernel_size(model));
  if (generated > static_cast<double>(budget)) {
    throw TermBudgetExceeded("partial sum over " + rect.to_string() + " needs " +
                             std::to_string(static_cast<long long>(generated)) +
                             " terms, budget is " + std::to_string(budget));
  }
  std::vector<Expansion::Term> terms;
  terms.reserve(static_cast<std::size_t>(generated));
  for_each_in_box(MultiIndex::ones(model.dim()), rect.upper(),
                  [&](const MultiIndex& u) { append_terms(model, u, terms); });
  return Expansion(std::move(terms));
}

double exact_variance_ratio(const FieldModel& model, const Rectangle& rect) {
  return norm2(partial_sum(model, rect), model.sigma2()) / static_cast<double>(rect.cells());
}

InnovationGrid draw_innovations(const InnovationLaw& law, const Box& box, std::uint64_t seed,
                                std::uint64_t stream) {
  InnovationGrid grid{box, {}};
  grid.values.resize(static_cast<std::size_t>(box.size()));
  CounterRng rng(seed, stream);
  for (auto& v : grid.values) v = law.draw(rng);
  return grid;
}

Box field_window(const FieldModel& model, const Rectangle& rect) {
  return Box{MultiIndex::ones(model.dim()) - model.max_lag(), rect.upper()};
}

double evaluate_term(const FieldModel& model, const MultiIndex& u, const InnovationGrid& grid) {
  double x = 0.0;
  if (model.is_linear()) {
    for (const auto& e : model.linear().entries()) x += e.coef * grid.at(u - e.lag);
  } else {
    for (const auto& e : model.volterra().entries()) {
      x += e.coef * grid.at(u - e.u) * grid.at(u - e.v);
    }
  }
  return x;
}

FieldSample sample(const FieldModel& model, const Rectangle& rect, std::uint64_t seed,
                   std::uint64_t stream) {
  require_same_dim(model.max_lag(), rect.upper());
  const auto grid = draw_innovations(model.law(), field_window(model, rect), seed, stream);
  FieldSample out{rect, {}};
  out.values.reserve(static_cast<std::size_t>(rect.cells()));
  for_each_in_box(MultiIndex::ones(model.dim()), rect.upper(),
                  [&](const MultiIndex& u) { out.values.push_back(evaluate_term(model, u, grid)); });
  return out;
}

}  // namespace orthomart
