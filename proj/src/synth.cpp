#include "zlink/synth.hpp"

#include "zlink/error.hpp"
#include "zlink/jsonl.hpp"
#include "zlink/rng.hpp"
#include "zlink/sha256.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_set>

namespace zlink {

namespace {

struct FeeDraw {
    std::vector<std::int64_t> fees;
    std::vector<double> weights;

    explicit FeeDraw(const std::vector<std::pair<std::int64_t, double>>& mix) {
        for (const auto& [fee, weight] : mix) {
            fees.push_back(fee);
            weights.push_back(weight);
        }
    }

    std::int64_t operator()(Rng& rng) const { return fees[rng.weighted(weights)]; }
};

/// Tracks every reserved vpub value so planted links stay provably unique;
/// duplicates appear only through collision injection.
class AmountPool {
public:
    bool taken(std::int64_t v) const { return used_.count(v) > 0; }
    void reserve(std::int64_t v) { used_.insert(v); }

    std::int64_t draw_unique(Rng& rng, std::int64_t lo, std::int64_t hi) {
        if (lo > hi) lo = hi;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            std::int64_t v = rng.log_uniform(lo, hi);
            if (!taken(v)) {
                reserve(v);
                return v;
            }
        }
        // dense range; probe linearly but never leave [lo, hi] — a duplicate
        // inside the range only suppresses matches, an overdraw would break
        // value conservation
        std::int64_t v = rng.log_uniform(lo, hi);
        while (taken(v) && v < hi) ++v;
        reserve(v);
        return v;
    }

    /// The closest free value to `v` within [1, hi]; used by pool steering
    /// where the magnitude matters more than the exact draw.
    std::int64_t reserve_near(std::int64_t v, std::int64_t hi) {
        v = std::clamp<std::int64_t>(v, 1, hi);
        for (std::int64_t step = 0;; ++step) {
            std::int64_t down = v - step;
            if (down >= 1 && !taken(down)) {
                reserve(down);
                return down;
            }
            std::int64_t up = v + step;
            if (up <= hi && !taken(up)) {
                reserve(up);
                return up;
            }
            if (down < 1 && up > hi) return 0;
        }
    }

private:
    std::unordered_set<std::int64_t> used_;
};

Bytes random_script(Rng& rng) {
    Bytes script(20);
    for (auto& b : script) b = static_cast<std::uint8_t>(rng.below(256));
    return script;
}

Bytes height_script(std::int64_t height) {
    Bytes script = {0x68};
    for (int i = 0; i < 8; ++i)
        script.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(height) >> (i * 8)));
    return script;
}

Bytes marker_script(std::uint8_t tag, std::int64_t a, std::int64_t b) {
    Bytes script = {tag};
    for (int i = 0; i < 8; ++i)
        script.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(a) >> (i * 8)));
    for (int i = 0; i < 8; ++i)
        script.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(b) >> (i * 8)));
    return script;
}

Hash32 synth_block_hash(std::int64_t height, std::int64_t time, const std::vector<TxRecord>& txs) {
    Bytes seed;
    for (int i = 0; i < 8; ++i)
        seed.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(height) >> (i * 8)));
    for (int i = 0; i < 8; ++i)
        seed.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(time) >> (i * 8)));
    for (const TxRecord& tx : txs) seed.insert(seed.end(), tx.txid.begin(), tx.txid.end());
    return dsha256(seed);
}

struct AvailOutput {
    TxId txid;
    std::uint32_t vout;
    std::int64_t value;
};

struct PlantPlan {
    MatchKind kind = MatchKind::Exact;
    std::size_t link_index = 0;
    std::int64_t shield_block = 0;
    std::int64_t deshield_block = 0;
    std::int64_t amount = 0;
    FeeSum fee; // empty parts for exact
    std::int64_t collide_block = -1;
};

enum class EventKind { PlantShield, PlantDeshield, CollideShield };

struct Event {
    EventKind kind;
    std::size_t plan_index;
    std::int64_t tx_fee = 0;      // chosen when the funding coinbase is built
    std::uint32_t funding_vout = 0;
};

} // namespace

void SynthConfig::validate() const {
    if (n_blocks < 1) throw ConfigError("synth: n_blocks must be at least 1");
    if (block_interval_seconds < 1) throw ConfigError("synth: block interval must be positive");
    if (block_interval_jitter < 0) throw ConfigError("synth: jitter must be non-negative");
    if (txs_per_block_min < 0 || txs_per_block_max < txs_per_block_min)
        throw ConfigError("synth: invalid txs-per-block range");
    auto prob = [](double p, const char* name) {
        if (p < 0 || p > 1) throw ConfigError(std::string("synth: ") + name + " must be in [0,1]");
    };
    prob(fraction_tx_with_joinsplit, "fraction_tx_with_joinsplit");
    prob(joinsplit_free_block_rate, "joinsplit_free_block_rate");
    prob(fully_shielded_rate, "fully_shielded_rate");
    prob(collision_rate, "collision_rate");
    if (target_pool_share && (*target_pool_share < 0 || *target_pool_share > 1))
        throw ConfigError("synth: target_pool_share must be in [0,1]");
    if (planted_exact_count < 0 || planted_fee1_count < 0 || planted_fee2_count < 0)
        throw ConfigError("synth: planted counts must be non-negative");
    std::int64_t plants = planted_exact_count + planted_fee1_count + planted_fee2_count;
    if (plants > 0 && n_blocks < 2)
        throw ConfigError("synth: planted links need at least 2 blocks");
    if (plant_delay_minutes_min < 0 || plant_delay_minutes_max < plant_delay_minutes_min)
        throw ConfigError("synth: invalid plant delay range");
    if (amount_min_zat < 1 || amount_max_zat < amount_min_zat ||
        amount_max_zat > Amount::kMaxMoney)
        throw ConfigError("synth: invalid amount range");
    if (plant_amount_max_zat < amount_min_zat || plant_amount_max_zat > Amount::kMaxMoney)
        throw ConfigError("synth: invalid plant amount range");
    if (block_reward_zat < 0 || block_reward_zat > Amount::kMaxMoney)
        throw ConfigError("synth: invalid block reward");
    if (fee_mix.empty()) throw ConfigError("synth: fee mix must not be empty");
    for (const auto& [fee, weight] : fee_mix) {
        if (fee < 0 || weight < 0) throw ConfigError("synth: invalid fee mix entry");
    }
    if (fee_window_hours < 1) throw ConfigError("synth: fee window must be positive");
}

std::pair<IngestBatch, GroundTruth> generate(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);
    FeeDraw draw_fee(config.fee_mix);
    WireLayoutConfig wire_cfg;

    std::vector<Amount> base_fees =
        config.base_fees.empty() ? default_base_fees() : config.base_fees;
    FeeSumSet fee1 = enumerate_fee_sums(base_fees, 1);
    FeeSumSet fee2 = enumerate_fee_sums(base_fees, 2);

    // block timestamps first, so plant delays can be mapped to heights
    std::vector<std::int64_t> times(static_cast<std::size_t>(config.n_blocks));
    std::int64_t t = config.start_time;
    for (auto& ti : times) {
        ti = t;
        std::int64_t jitter =
            config.block_interval_jitter > 0
                ? rng.range(-config.block_interval_jitter, config.block_interval_jitter)
                : 0;
        t += std::max<std::int64_t>(1, config.block_interval_seconds + jitter);
    }

    AmountPool amounts;
    GroundTruth truth;
    std::vector<PlantPlan> plans;

    auto plan_plant = [&](MatchKind kind, const FeeSum* fee) {
        PlantPlan plan;
        plan.kind = kind;
        if (fee) plan.fee = *fee;

        plan.shield_block = rng.range(0, config.n_blocks - 2);
        std::int64_t max_delay = config.plant_delay_minutes_max;
        if (kind != MatchKind::Exact)
            max_delay = std::min(max_delay, config.fee_window_hours * 60 - 60);
        std::int64_t delay = rng.range(config.plant_delay_minutes_min,
                                       std::max(config.plant_delay_minutes_min, max_delay));

        std::int64_t shield_time = times[static_cast<std::size_t>(plan.shield_block)];
        std::int64_t target_time = shield_time + delay * 60;
        std::int64_t d = plan.shield_block + 1;
        while (d + 1 < config.n_blocks && times[static_cast<std::size_t>(d)] < target_time) ++d;
        if (kind != MatchKind::Exact) {
            while (d > plan.shield_block + 1 &&
                   times[static_cast<std::size_t>(d)] - shield_time >
                       config.fee_window_hours * 3600)
                --d;
            if (times[static_cast<std::size_t>(d)] - shield_time > config.fee_window_hours * 3600)
                throw ConfigError("synth: block spacing cannot fit a fee plant in the window");
        }
        plan.deshield_block = d;

        std::int64_t fee_total = fee ? fee->total.to_zat() : 0;
        std::int64_t lo = std::max(config.amount_min_zat, fee_total + 1);
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 1000) throw ConfigError("synth: cannot draw a unique plant amount");
            std::int64_t a = rng.log_uniform(lo, std::max(lo, config.plant_amount_max_zat));
            if (amounts.taken(a) || (fee_total > 0 && amounts.taken(a - fee_total))) continue;
            amounts.reserve(a);
            if (fee_total > 0) amounts.reserve(a - fee_total);
            plan.amount = a;
            break;
        }

        if (kind == MatchKind::Exact && rng.chance(config.collision_rate))
            plan.collide_block = rng.range(0, plan.deshield_block - 1);

        PlantedLink link;
        link.kind = kind;
        link.amount = Amount::zat(plan.amount);
        if (fee) {
            link.fee = fee->total;
            link.fee_parts = fee->parts;
        }
        link.collided = plan.collide_block >= 0;
        plan.link_index = truth.planted.size();
        truth.planted.push_back(link);
        plans.push_back(plan);
    };

    for (std::int64_t i = 0; i < config.planted_exact_count; ++i)
        plan_plant(MatchKind::Exact, nullptr);
    for (std::int64_t i = 0; i < config.planted_fee1_count; ++i) {
        const FeeSum& fee = fee1.sums[rng.below(fee1.sums.size())];
        plan_plant(MatchKind::Fee1, &fee);
    }
    for (std::int64_t i = 0; i < config.planted_fee2_count; ++i) {
        const FeeSum& fee = fee2.sums[rng.below(fee2.sums.size())];
        plan_plant(MatchKind::Fee2, &fee);
    }

    std::map<std::int64_t, std::vector<Event>> events_by_block;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        events_by_block[plans[i].shield_block].push_back({EventKind::PlantShield, i});
        events_by_block[plans[i].deshield_block].push_back({EventKind::PlantDeshield, i});
        if (plans[i].collide_block >= 0)
            events_by_block[plans[i].collide_block].push_back({EventKind::CollideShield, i});
    }

    IngestBatch batch;
    batch.source = IngestSource::Jsonl;
    batch.blocks.reserve(static_cast<std::size_t>(config.n_blocks));

    std::vector<AvailOutput> avail;
    std::int64_t pool = 0;
    std::int64_t reserved = 0; // owed to outstanding planted deshields
    std::int64_t supply = 0;

    auto take_avail = [&](std::size_t index) {
        AvailOutput out = avail[index];
        avail[index] = avail.back();
        avail.pop_back();
        return out;
    };

    auto finish_tx = [&](TxRecord& tx, BlockRecord& block) {
        tx.txid = dsha256(serialize_transaction(tx, wire_cfg));
        for (std::uint32_t i = 0; i < tx.outputs.size(); ++i)
            avail.push_back({tx.txid, i, tx.outputs[i].value.to_zat()});
        block.txs.push_back(std::move(tx));
    };

    for (std::int64_t h = 0; h < config.n_blocks; ++h) {
        std::vector<Event> events;
        if (auto it = events_by_block.find(h); it != events_by_block.end()) events = it->second;

        BlockRecord block;
        block.height = h;
        block.time = times[static_cast<std::size_t>(h)];

        // coinbase pays the reward plus one dedicated funding output per
        // shielding event, so plants of any size stay solvent
        TxRecord coinbase;
        coinbase.is_coinbase = true;
        coinbase.outputs.push_back({Amount::zat(config.block_reward_zat), height_script(h)});
        for (Event& ev : events) {
            if (ev.kind == EventKind::PlantShield || ev.kind == EventKind::CollideShield) {
                ev.tx_fee = draw_fee(rng);
                ev.funding_vout = static_cast<std::uint32_t>(coinbase.outputs.size());
                coinbase.outputs.push_back(
                    {Amount::zat(plans[ev.plan_index].amount + ev.tx_fee), random_script(rng)});
            }
        }
        for (const TxOut& out : coinbase.outputs) supply += out.value.to_zat();
        TxId coinbase_txid;
        {
            TxRecord cb = coinbase;
            finish_tx(cb, block);
            coinbase_txid = block.txs.back().txid;
        }

        bool js_free = events.empty() && rng.chance(config.joinsplit_free_block_rate);
        std::int64_t n_regular = rng.range(config.txs_per_block_min, config.txs_per_block_max);
        n_regular = std::max<std::int64_t>(n_regular, static_cast<std::int64_t>(events.size()));
        if (!js_free) n_regular = std::max<std::int64_t>(n_regular, 1);

        std::size_t event_cursor = 0;
        bool block_has_js = false;
        for (std::int64_t slot = 0; slot < n_regular; ++slot) {
            TxRecord tx;

            if (event_cursor < events.size()) {
                const Event& ev = events[event_cursor++];
                PlantPlan& plan = plans[ev.plan_index];
                PlantedLink& link = truth.planted[plan.link_index];

                if (ev.kind == EventKind::PlantShield || ev.kind == EventKind::CollideShield) {
                    tx.inputs.push_back({coinbase_txid, ev.funding_vout});
                    tx.joinsplits.push_back({Amount::zat(plan.amount), Amount::zat(0)});
                    pool += plan.amount;
                    if (ev.kind == EventKind::PlantShield)
                        reserved += plan.amount - link.fee.to_zat();
                    else
                        ++truth.decoy_joinsplits;
                } else {
                    std::int64_t vpub_new = plan.amount - link.fee.to_zat();
                    std::int64_t tx_fee = std::min(draw_fee(rng), vpub_new);
                    tx.joinsplits.push_back({Amount::zat(0), Amount::zat(vpub_new)});
                    if (vpub_new - tx_fee > 0)
                        tx.outputs.push_back({Amount::zat(vpub_new - tx_fee), random_script(rng)});
                    pool -= vpub_new;
                    reserved -= vpub_new;
                }

                bool is_shield_side = ev.kind == EventKind::PlantShield;
                bool is_deshield_side = ev.kind == EventKind::PlantDeshield;
                finish_tx(tx, block);
                if (is_shield_side) {
                    link.shield_txid = block.txs.back().txid;
                    link.shield_js = 0;
                } else if (is_deshield_side) {
                    link.deshield_txid = block.txs.back().txid;
                    link.deshield_js = 0;
                }
                block_has_js = true;
                continue;
            }

            // the first free slot of a JoinSplit block always carries one, so
            // the JoinSplit-free block rate is exactly the configured knob
            bool wants_js = !js_free && (!block_has_js || rng.chance(config.fraction_tx_with_joinsplit));
            if (config.target_pool_share) wants_js = !js_free && !block_has_js;

            if (wants_js && config.target_pool_share) {
                // steer the pool toward the target share of current supply
                auto target = static_cast<std::int64_t>(*config.target_pool_share *
                                                        static_cast<double>(supply));
                std::int64_t diff = target - pool;
                if (diff >= 0) {
                    if (avail.empty()) continue;
                    std::size_t best = 0;
                    for (std::size_t i = 1; i < avail.size(); ++i)
                        if (avail[i].value > avail[best].value) best = i;
                    AvailOutput in = take_avail(best);
                    std::int64_t fee = std::min(draw_fee(rng), in.value);
                    std::int64_t cap = in.value - fee;
                    std::int64_t value = cap > 0 ? amounts.reserve_near(std::max<std::int64_t>(diff, 1), cap) : 0;
                    tx.inputs.push_back({in.txid, in.vout});
                    if (value > 0) {
                        tx.joinsplits.push_back({Amount::zat(value), Amount::zat(0)});
                        pool += value;
                        ++truth.decoy_joinsplits;
                        block_has_js = true;
                    }
                    std::int64_t change = in.value - value - fee;
                    if (change > 0)
                        tx.outputs.push_back({Amount::zat(change), random_script(rng)});
                } else {
                    std::int64_t withdrawable = pool - reserved;
                    std::int64_t value = withdrawable > 0
                                             ? amounts.reserve_near(-diff, withdrawable)
                                             : 0;
                    if (value > 0) {
                        std::int64_t fee = std::min(draw_fee(rng), value);
                        tx.joinsplits.push_back({Amount::zat(0), Amount::zat(value)});
                        if (value - fee > 0)
                            tx.outputs.push_back({Amount::zat(value - fee), random_script(rng)});
                        pool -= value;
                        ++truth.decoy_joinsplits;
                        block_has_js = true;
                    } else {
                        continue;
                    }
                }
            } else if (wants_js && rng.chance(config.fully_shielded_rate)) {
                // z->z decoy: both vpubs zero, funded like a transparent tx
                if (avail.empty()) continue;
                AvailOutput in = take_avail(rng.below(avail.size()));
                std::int64_t fee = std::min(draw_fee(rng), in.value);
                tx.inputs.push_back({in.txid, in.vout});
                if (in.value - fee > 0)
                    tx.outputs.push_back({Amount::zat(in.value - fee), random_script(rng)});
                tx.joinsplits.push_back({Amount::zat(0), Amount::zat(0)});
                ++truth.decoy_joinsplits;
                block_has_js = true;
            } else if (wants_js) {
                bool shield = rng.chance(0.5);
                std::int64_t withdrawable = pool - reserved;
                if (!shield && withdrawable < config.amount_min_zat) shield = true;

                if (shield) {
                    if (avail.empty()) continue;
                    AvailOutput in = take_avail(rng.below(avail.size()));
                    std::int64_t fee = draw_fee(rng);
                    tx.inputs.push_back({in.txid, in.vout});
                    if (in.value <= fee + config.amount_min_zat) {
                        // small output: shield whatever remains after the fee
                        fee = std::min(fee, in.value);
                        std::int64_t value = in.value - fee;
                        if (value > 0) {
                            if (!amounts.taken(value)) amounts.reserve(value);
                            tx.joinsplits.push_back({Amount::zat(value), Amount::zat(0)});
                            pool += value;
                            ++truth.decoy_joinsplits;
                            block_has_js = true;
                        } else if (in.value - fee > 0) {
                            tx.outputs.push_back(
                                {Amount::zat(in.value - fee), random_script(rng)});
                        }
                    } else {
                        std::int64_t cap = std::min(config.amount_max_zat, in.value - fee);
                        std::int64_t value = amounts.draw_unique(rng, config.amount_min_zat, cap);
                        tx.joinsplits.push_back({Amount::zat(value), Amount::zat(0)});
                        std::int64_t change = in.value - value - fee;
                        if (change > 0)
                            tx.outputs.push_back({Amount::zat(change), random_script(rng)});
                        pool += value;
                        ++truth.decoy_joinsplits;
                        block_has_js = true;
                    }
                } else {
                    std::int64_t cap = std::min(config.amount_max_zat, withdrawable);
                    std::int64_t value = amounts.draw_unique(rng, config.amount_min_zat, cap);
                    std::int64_t fee = std::min(draw_fee(rng), value);
                    tx.joinsplits.push_back({Amount::zat(0), Amount::zat(value)});
                    if (value - fee > 0)
                        tx.outputs.push_back({Amount::zat(value - fee), random_script(rng)});
                    pool -= value;
                    ++truth.decoy_joinsplits;
                    block_has_js = true;
                }
            } else {
                if (avail.empty()) continue;
                AvailOutput in = take_avail(rng.below(avail.size()));
                std::int64_t fee = std::min(draw_fee(rng), in.value);
                std::int64_t rest = in.value - fee;
                tx.inputs.push_back({in.txid, in.vout});
                if (rest > 1 && rng.chance(0.3)) {
                    std::int64_t first = rng.range(1, rest - 1);
                    tx.outputs.push_back({Amount::zat(first), random_script(rng)});
                    tx.outputs.push_back({Amount::zat(rest - first), random_script(rng)});
                } else if (rest > 0) {
                    tx.outputs.push_back({Amount::zat(rest), random_script(rng)});
                }
            }

            if (tx.inputs.empty() && tx.outputs.empty() && tx.joinsplits.empty()) continue;
            finish_tx(tx, block);
        }

        block.hash = synth_block_hash(block.height, block.time, block.txs);
        batch.blocks.push_back(std::move(block));
    }

    truth.chain_tag = batch.blocks.front().hash;
    return {std::move(batch), std::move(truth)};
}

void inject_duplicate_shielding(IngestBatch& batch, Amount amount, std::int64_t insert_after_height,
                                const WireLayoutConfig& cfg) {
    if (batch.blocks.empty()) throw ConfigError("cannot inject into an empty batch");
    std::int64_t first = batch.blocks.front().height;
    auto index = static_cast<std::size_t>(insert_after_height - first);
    if (insert_after_height < first || index >= batch.blocks.size())
        throw ConfigError("insert_after_height is not in the batch");

    const BlockRecord& anchor = batch.blocks[index];

    BlockRecord block;
    block.height = anchor.height + 1;
    block.time = anchor.time + 1;

    constexpr std::int64_t kFee = 10000;
    TxRecord coinbase;
    coinbase.is_coinbase = true;
    coinbase.outputs.push_back(
        {Amount::zat(amount.to_zat() + kFee), marker_script(0xd5, block.height, amount.to_zat())});
    coinbase.txid = dsha256(serialize_transaction(coinbase, cfg));

    TxRecord shield;
    shield.inputs.push_back({coinbase.txid, 0});
    shield.joinsplits.push_back({amount, Amount::zat(0)});
    shield.txid = dsha256(serialize_transaction(shield, cfg));

    block.txs.push_back(std::move(coinbase));
    block.txs.push_back(std::move(shield));
    block.hash = synth_block_hash(block.height, block.time, block.txs);

    batch.blocks.insert(batch.blocks.begin() + static_cast<std::ptrdiff_t>(index) + 1,
                        std::move(block));
    for (std::size_t i = index + 2; i < batch.blocks.size(); ++i) ++batch.blocks[i].height;
}

std::vector<RttMatch> oracle_exact_rtts(const IngestBatch& batch, std::size_t max_joinsplits) {
    struct LocatedJs {
        std::int64_t height;
        std::int64_t time;
        TxId txid;
        std::uint32_t js_index;
        std::int64_t vpub_old;
        std::int64_t vpub_new;
    };
    std::vector<LocatedJs> all;
    for (const BlockRecord& block : batch.blocks) {
        for (const TxRecord& tx : block.txs) {
            for (std::uint32_t i = 0; i < tx.joinsplits.size(); ++i) {
                const JoinSplitDesc& js = tx.joinsplits[i];
                all.push_back({block.height, block.time, tx.txid, i, js.vpub_old.to_zat(),
                               js.vpub_new.to_zat()});
            }
        }
    }
    if (all.size() > max_joinsplits)
        throw ConfigError("oracle guard: " + std::to_string(all.size()) +
                          " JoinSplits exceed the nested-loop limit of " +
                          std::to_string(max_joinsplits));

    // literal nested-loop evaluation of the definition, no indexes
    std::map<std::int64_t, std::vector<std::pair<std::size_t, std::size_t>>> pairs_by_amount;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i].vpub_old <= 0) continue;
        for (std::size_t j = 0; j < all.size(); ++j) {
            if (all[j].vpub_new != all[i].vpub_old) continue;
            if (all[j].height <= all[i].height) continue;
            auto& pairs = pairs_by_amount[all[i].vpub_old];
            pairs.emplace_back(i, j);
            if (pairs.size() > 100'000)
                throw ConfigError("oracle guard: amount " + std::to_string(all[i].vpub_old) +
                                  " exceeds 100000 candidate pairs");
        }
    }

    std::vector<RttMatch> matches;
    for (const auto& [amount, pairs] : pairs_by_amount) {
        if (pairs.size() != 1) continue;
        const LocatedJs& s = all[pairs[0].first];
        const LocatedJs& d = all[pairs[0].second];
        RttMatch m;
        m.shield = {s.txid, s.js_index, s.height, s.time};
        m.deshield = {d.txid, d.js_index, d.height, d.time};
        m.amount = Amount::zat(amount);
        m.kind = MatchKind::Exact;
        m.delta_blocks = d.height - s.height;
        m.delta_minutes = d.time <= s.time ? 0 : (d.time - s.time) / 60;
        matches.push_back(std::move(m));
    }
    std::sort(matches.begin(), matches.end(), match_order);
    return matches;
}

namespace {

std::string format_ratio_3dp(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return "1.000";
    std::uint64_t scaled = (num * 1000 + den / 2) / den;
    std::string frac = std::to_string(scaled % 1000);
    while (frac.size() < 3) frac.insert(frac.begin(), '0');
    return std::to_string(scaled / 1000) + "." + frac;
}

using PairKey = std::tuple<TxId, std::uint32_t, TxId, std::uint32_t>;

} // namespace

double EvalScore::precision() const {
    std::uint64_t den = true_positives + false_positives;
    return den == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(den);
}

double EvalScore::recall() const {
    std::uint64_t den = true_positives + false_negatives;
    return den == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(den);
}

std::string EvalScore::precision_str() const {
    return format_ratio_3dp(true_positives, true_positives + false_positives);
}

std::string EvalScore::recall_str() const {
    return format_ratio_3dp(true_positives, true_positives + false_negatives);
}

EvalScore score(const std::vector<RttMatch>& detected, const GroundTruth& truth) {
    EvalScore result;

    std::set<PairKey> planted;
    for (const PlantedLink& link : truth.planted) {
        planted.insert({link.shield_txid, link.shield_js, link.deshield_txid, link.deshield_js});
        result.planted_coins += link.amount;
    }

    std::set<PairKey> seen;
    for (const RttMatch& m : detected) {
        result.detected_coins += m.amount;
        PairKey key{m.shield.txid, m.shield.js_index, m.deshield.txid, m.deshield.js_index};
        seen.insert(key);
        if (planted.count(key))
            ++result.true_positives;
        else
            ++result.false_positives;
    }
    for (const PairKey& key : planted) {
        if (!seen.count(key)) ++result.false_negatives;
    }
    return result;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
    nlohmann::ordered_json meta;
    meta["chain_tag"] = hash_to_display_hex(truth.chain_tag);
    meta["planted"] = truth.planted.size();
    meta["decoy_joinsplits"] = truth.decoy_joinsplits;
    out << meta.dump() << '\n';
    for (const PlantedLink& link : truth.planted) {
        nlohmann::ordered_json j;
        j["kind"] = to_string(link.kind);
        j["shield_txid"] = hash_to_display_hex(link.shield_txid);
        j["shield_js"] = link.shield_js;
        j["deshield_txid"] = hash_to_display_hex(link.deshield_txid);
        j["deshield_js"] = link.deshield_js;
        j["amount_zat"] = link.amount.to_zat();
        j["fee_zat"] = link.fee.to_zat();
        auto parts = nlohmann::ordered_json::array();
        for (Amount part : link.fee_parts) parts.push_back(part.to_zat());
        j["fee_parts_zat"] = parts;
        j["collided"] = link.collided;
        out << j.dump() << '\n';
    }
    if (!out) throw ParseError("failed to write ground truth stream");
}

GroundTruth read_ground_truth(std::istream& in) {
    GroundTruth truth;
    std::string line;
    std::size_t line_no = 0;
    bool have_meta = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::string where = "truth line " + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": invalid JSON: " + e.what());
        }
        try {
            if (!have_meta) {
                if (!j.contains("chain_tag") || !j["chain_tag"].is_string())
                    throw ParseError(where + ": missing chain_tag");
                truth.chain_tag = hash_from_display_hex(j["chain_tag"].get<std::string>());
                if (j.contains("decoy_joinsplits"))
                    truth.decoy_joinsplits = j["decoy_joinsplits"].get<std::uint64_t>();
                have_meta = true;
                continue;
            }
            PlantedLink link;
            std::string kind = j.at("kind").get<std::string>();
            link.kind = kind == "exact"  ? MatchKind::Exact
                        : kind == "fee1" ? MatchKind::Fee1
                                         : MatchKind::Fee2;
            link.shield_txid = hash_from_display_hex(j.at("shield_txid").get<std::string>());
            link.shield_js = j.at("shield_js").get<std::uint32_t>();
            link.deshield_txid = hash_from_display_hex(j.at("deshield_txid").get<std::string>());
            link.deshield_js = j.at("deshield_js").get<std::uint32_t>();
            link.amount = Amount::zat(j.at("amount_zat").get<std::int64_t>());
            link.fee = Amount::zat(j.at("fee_zat").get<std::int64_t>());
            if (j.contains("fee_parts_zat"))
                for (const auto& part : j["fee_parts_zat"])
                    link.fee_parts.push_back(Amount::zat(part.get<std::int64_t>()));
            if (j.contains("collided")) link.collided = j["collided"].get<bool>();
            truth.planted.push_back(std::move(link));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (!have_meta) throw ParseError("ground truth stream has no meta line");
    return truth;
}

} // namespace zlink
