"""JSON wire format for obfuscation requests and responses.

Field names are part of the external contract and must not drift:

  request:  zones[].id, zones[].coordinates.{start_x,start_y,end_x,end_y},
            zones[].layers[].{algorithm_id,key}
  response: document_id, zones[].{id,coordinates,obfuscationKey}
"""

from __future__ import annotations

from ..errors import InvalidInput
from ..imaging import Rect
from .keys import LayerSpec, MasterKey, ZoneSpec


def parse_request(body: dict) -> list[ZoneSpec]:
    """Parse an obfuscation request body into zone specs."""
    try:
        zones_raw = body["zones"]
    except (TypeError, KeyError):
        raise InvalidInput("request body must contain a 'zones' array") from None
    zones = []
    for z in zones_raw:
        try:
            rect = Rect.from_dict(z["coordinates"])
            layers = tuple(
                LayerSpec(
                    algorithm_id=int(l["algorithm_id"]),
                    key_material=str(l["key"]).encode("utf-8"),
                )
                for l in z["layers"]
            )
            zones.append(ZoneSpec(id=int(z["id"]), rect=rect, layers=layers))
        except (TypeError, KeyError, ValueError) as exc:
            raise InvalidInput(f"malformed zone entry: {exc}") from exc
    return zones


def build_response(master: MasterKey) -> dict:
    """Render a master key as the obfuscation response body."""
    return {
        "document_id": master.document_id,
        "zones": [
            {
                "id": record.zone_id,
                "coordinates": record.rect.to_dict(),
                "obfuscationKey": record.obfuscation_key,
            }
            for record in master.records
        ],
    }
